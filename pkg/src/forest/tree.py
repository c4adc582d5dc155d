"""
Honest causal trees over the target-component space.

Split rules are chosen on the training half of an honest split by maximizing
the size-weighted squared leaf effect; leaf treated and control means come
from the estimation half only. Trees are stored as flat node arrays.
"""

from collections.abc import Sequence
from dataclasses import dataclass, field
from math import ceil

import numpy as np
from loguru import logger

from src.data.dataset import HonestSplit
from src.utils.exceptions import (
    ArmEmptyError,
    ConfigurationError,
    ShapeError,
    SplitInfeasibleError,
    TreeDegenerateError,
)

LEAF = -1
TIE_TOLERANCE = 1e-12

SeedLike = int | Sequence[int]


@dataclass(frozen=True)
class SplitRule:
    """Axis-aligned split: go left when point[coordinate] <= threshold."""

    coordinate: int
    threshold: float
    criterion: float = 0.0


@dataclass(frozen=True)
class TreeParams:
    """Growth parameters shared by every tree of a forest."""

    alpha: float = 0.2
    k: int = 10
    pi: float = 0.8
    min_arm: int = 3

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha <= 0.5:
            raise ConfigurationError(f"alpha must lie in (0, 0.5], got {self.alpha}")
        if self.k < 1:
            raise ConfigurationError(f"k must be at least 1, got {self.k}")
        if not 0.0 < self.pi <= 1.0:
            raise ConfigurationError(f"pi must lie in (0, 1], got {self.pi}")
        if self.min_arm < 1:
            raise ConfigurationError(f"min_arm must be at least 1, got {self.min_arm}")

    def min_child_size(self, n_node: int) -> int:
        return max(ceil(self.alpha * n_node), self.k)


def leaf_effect(outcomes: np.ndarray, policy: np.ndarray) -> float:
    """Difference between mean treated and mean control outcomes."""
    outcomes = np.asarray(outcomes, dtype=np.float64)
    treated = np.asarray(policy) == 1
    if not treated.any() or treated.all():
        raise ArmEmptyError(
            f"Leaf effect needs both arms (treated={int(treated.sum())}, "
            f"control={int((~treated).sum())})"
        )
    return float(outcomes[treated].mean() - outcomes[~treated].mean())


def best_split(
    components: np.ndarray,
    outcomes: np.ndarray,
    policy: np.ndarray,
    candidate_coords: Sequence[int],
    params: TreeParams,
) -> SplitRule | None:
    """
    Find the admissible split maximizing N_left * theta_left^2 + N_right * theta_right^2.

    Thresholds are midpoints between consecutive distinct values. A split is
    admissible when both children hold at least max(ceil(alpha * n), k)
    observations and min_arm treated and control units. Ties go to the lowest
    coordinate, then the lowest threshold.

    Args:
        components: Training component scores in the node (n x q)
        outcomes: Training outcomes in the node
        policy: Training policy indicators in the node
        candidate_coords: Coordinates eligible at this node
        params: Tree growth parameters

    Returns:
        The best SplitRule, or None if the node has fewer than 2k observations
        or no admissible split exists
    """
    C = np.atleast_2d(np.asarray(components, dtype=np.float64))
    y = np.asarray(outcomes, dtype=np.float64)
    d = np.asarray(policy, dtype=np.float64)
    n = C.shape[0]
    if n < 2 * params.k:
        return None

    min_child = params.min_child_size(n)
    n_left = np.arange(1, n)
    n_right = n - n_left
    total_treated = d.sum()
    total_control = n - total_treated

    best: SplitRule | None = None
    for j in sorted(candidate_coords):
        order = np.argsort(C[:, j], kind="stable")
        xs, ys, ds = C[order, j], y[order], d[order]

        t_left = np.cumsum(ds)[:-1]
        c_left = n_left - t_left
        t_right = total_treated - t_left
        c_right = total_control - c_left
        ty = np.cumsum(ys * ds)
        cy = np.cumsum(ys * (1.0 - ds))
        ty_left, cy_left = ty[:-1], cy[:-1]
        ty_right, cy_right = ty[-1] - ty_left, cy[-1] - cy_left

        admissible = (
            (xs[:-1] < xs[1:])
            & (n_left >= min_child)
            & (n_right >= min_child)
            & (np.minimum.reduce([t_left, c_left, t_right, c_right]) >= params.min_arm)
        )
        if not admissible.any():
            continue

        with np.errstate(divide="ignore", invalid="ignore"):
            theta_left = ty_left / t_left - cy_left / c_left
            theta_right = ty_right / t_right - cy_right / c_right
            criterion = n_left * theta_left**2 + n_right * theta_right**2
        criterion = np.where(admissible, criterion, -np.inf)

        i = int(np.argmax(criterion))
        value = float(criterion[i])
        if best is None or value > best.criterion + TIE_TOLERANCE * max(1.0, abs(best.criterion)):
            threshold = float((xs[i] + xs[i + 1]) / 2)
            best = SplitRule(coordinate=j, threshold=threshold, criterion=value)

    return best


def draw_eligible(rng: np.random.Generator, q: int, pi: float) -> list[int]:
    """Mark each coordinate eligible with probability pi, redrawing an empty set."""
    while True:
        mask = rng.random(q) < pi
        if mask.any():
            return [int(j) for j in np.flatnonzero(mask)]


@dataclass(frozen=True)
class CausalTree:
    """
    Honest causal tree in flat-array form.

    Node 0 is the root. Internal nodes carry a coordinate in `feature` and a
    threshold; leaves have feature -1. Treated/control means and counts are
    estimation-half statistics; `n_train` counts training observations.
    Index arrays refer to rows of the data the tree was built on.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    treated_mean: np.ndarray
    control_mean: np.ndarray
    n_treated: np.ndarray
    n_control: np.ndarray
    n_train: np.ndarray
    train_indices: np.ndarray
    estimation_indices: np.ndarray
    n_features: int
    seed: tuple[int, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        for name in (
            "feature", "threshold", "left", "right", "treated_mean", "control_mean",
            "n_treated", "n_control", "n_train", "train_indices", "estimation_indices",
        ):
            getattr(self, name).setflags(write=False)

    @property
    def n_nodes(self) -> int:
        return int(self.feature.shape[0])

    @property
    def leaves(self) -> np.ndarray:
        return np.flatnonzero(self.feature == LEAF)

    @property
    def n_leaves(self) -> int:
        return int(self.leaves.shape[0])

    def apply(self, points: np.ndarray) -> np.ndarray:
        """Leaf node index reached by each row of points."""
        X = np.atleast_2d(np.asarray(points, dtype=np.float64))
        if X.shape[1] != self.n_features:
            raise ShapeError(f"Tree expects {self.n_features} coordinates, got {X.shape[1]}")

        node = np.zeros(X.shape[0], dtype=np.int64)
        active = np.flatnonzero(self.feature[node] != LEAF)
        while active.size:
            current = node[active]
            go_left = X[active, self.feature[current]] <= self.threshold[current]
            node[active] = np.where(go_left, self.left[current], self.right[current])
            active = active[self.feature[node[active]] != LEAF]
        return node

    def predict(self, points: np.ndarray) -> np.ndarray:
        """Leaf effect (treated mean minus control mean) for each row of points."""
        leaf = self.apply(points)
        return self.treated_mean[leaf] - self.control_mean[leaf]

    def leaf_effects(self) -> np.ndarray:
        leaves = self.leaves
        return self.treated_mean[leaves] - self.control_mean[leaves]

    def leaf_training_counts(self) -> np.ndarray:
        return self.n_train[self.leaves]

    def overlap_fractions(self) -> np.ndarray:
        """Treated share of estimation observations in each leaf."""
        leaves = self.leaves
        return self.n_treated[leaves] / (self.n_treated[leaves] + self.n_control[leaves])


@dataclass
class _Node:
    train: np.ndarray
    estimation: np.ndarray
    feature: int = LEAF
    threshold: float = 0.0
    left: int = LEAF
    right: int = LEAF


def _as_seed(seed: SeedLike) -> tuple[int, ...]:
    return (int(seed),) if isinstance(seed, (int, np.integer)) else tuple(int(s) for s in seed)


def build_tree(
    components: np.ndarray,
    outcomes: np.ndarray,
    policy: np.ndarray,
    honest: HonestSplit,
    params: TreeParams,
    seed: SeedLike,
) -> CausalTree:
    """
    Grow an honest causal tree.

    Splits are searched on training-half rows only, over coordinates each
    drawn eligible with probability pi. Leaves whose estimation half lacks
    min_arm units of either arm are collapsed into their parent until every
    leaf qualifies.

    Args:
        components: Component scores (n x q)
        outcomes: Outcomes (length n)
        policy: Binary policy (length n)
        honest: Training/estimation partition of the rows
        params: Growth parameters
        seed: Integer or integer tuple seeding the coordinate draws

    Returns:
        CausalTree

    Raises:
        SplitInfeasibleError: If an arm is missing from either half
        TreeDegenerateError: If even the root fails min_arm on the estimation half
    """
    C = np.atleast_2d(np.asarray(components, dtype=np.float64))
    y = np.asarray(outcomes, dtype=np.float64)
    d = np.asarray(policy)
    q = C.shape[1]
    train, est = honest.train_indices, honest.estimation_indices

    for name, half in (("training", train), ("estimation", est)):
        n_treated = int(d[half].sum())
        if n_treated == 0 or n_treated == half.size:
            raise SplitInfeasibleError(f"The {name} half is missing a policy arm")

    seed_tuple = _as_seed(seed)
    rng = np.random.default_rng(seed_tuple)

    nodes = [_Node(train=train, estimation=est)]
    stack = [0]
    while stack:
        node = nodes[stack.pop()]
        if node.train.size < 2 * params.k:
            continue
        eligible = draw_eligible(rng, q, params.pi)
        rule = best_split(C[node.train], y[node.train], d[node.train], eligible, params)
        if rule is None:
            continue

        node.feature, node.threshold = rule.coordinate, rule.threshold
        node.left, node.right = len(nodes), len(nodes) + 1
        train_left = C[node.train, rule.coordinate] <= rule.threshold
        est_left = C[node.estimation, rule.coordinate] <= rule.threshold
        nodes.append(_Node(train=node.train[train_left], estimation=node.estimation[est_left]))
        nodes.append(_Node(train=node.train[~train_left], estimation=node.estimation[~est_left]))
        stack.extend([node.right, node.left])

    n_treated = np.array([int(d[nd.estimation].sum()) for nd in nodes])
    n_control = np.array([nd.estimation.size for nd in nodes]) - n_treated

    def fails(i: int) -> bool:
        return n_treated[i] < params.min_arm or n_control[i] < params.min_arm

    # Children always carry larger indices than their parent
    collapsed = 0
    for i in range(len(nodes) - 1, -1, -1):
        nd = nodes[i]
        if nd.feature == LEAF:
            continue
        if any(nodes[c].feature == LEAF and fails(c) for c in (nd.left, nd.right)):
            nd.feature, nd.left, nd.right = LEAF, LEAF, LEAF
            collapsed += 1
    if fails(0):
        raise TreeDegenerateError(
            f"Root has {n_treated[0]} treated and {n_control[0]} control estimation units; "
            f"min_arm is {params.min_arm}"
        )
    if collapsed:
        logger.debug(f"Collapsed {collapsed} split(s) failing min_arm on the estimation half")

    return _compact(nodes, n_treated, n_control, y, d, train, est, q, seed_tuple)


def _compact(
    nodes: list[_Node],
    n_treated: np.ndarray,
    n_control: np.ndarray,
    y: np.ndarray,
    d: np.ndarray,
    train: np.ndarray,
    est: np.ndarray,
    q: int,
    seed: tuple[int, ...],
) -> CausalTree:
    """Renumber the reachable nodes in preorder and pack them into arrays."""
    order: list[int] = []
    stack = [0]
    while stack:
        i = stack.pop()
        order.append(i)
        if nodes[i].feature != LEAF:
            stack.extend([nodes[i].right, nodes[i].left])
    new_id = {old: new for new, old in enumerate(order)}

    m = len(order)
    feature = np.full(m, LEAF, dtype=np.int64)
    threshold = np.zeros(m)
    left = np.full(m, LEAF, dtype=np.int64)
    right = np.full(m, LEAF, dtype=np.int64)
    treated_mean = np.zeros(m)
    control_mean = np.zeros(m)
    n_train = np.zeros(m, dtype=np.int64)

    for new, old in enumerate(order):
        nd = nodes[old]
        n_train[new] = nd.train.size
        outcomes, arm = y[nd.estimation], d[nd.estimation] == 1
        if arm.any():
            treated_mean[new] = outcomes[arm].mean()
        if (~arm).any():
            control_mean[new] = outcomes[~arm].mean()
        if nd.feature != LEAF:
            feature[new] = nd.feature
            threshold[new] = nd.threshold
            left[new] = new_id[nd.left]
            right[new] = new_id[nd.right]

    return CausalTree(
        feature=feature,
        threshold=threshold,
        left=left,
        right=right,
        treated_mean=treated_mean,
        control_mean=control_mean,
        n_treated=n_treated[order].astype(np.int64),
        n_control=n_control[order].astype(np.int64),
        n_train=n_train,
        train_indices=np.asarray(train, dtype=np.int64).copy(),
        estimation_indices=np.asarray(est, dtype=np.int64).copy(),
        n_features=q,
        seed=seed,
    )


def audit_regularity(tree: CausalTree, params: TreeParams) -> list[str]:
    """
    List (alpha, k) regularity and min_arm violations of a built tree.

    An empty list means every internal node had at least 2k training
    observations, every child kept at least max(ceil(alpha * n), k) of them,
    and every leaf holds min_arm units of each arm on the estimation half.
    """
    violations: list[str] = []
    for i in range(tree.n_nodes):
        if tree.feature[i] == LEAF:
            if tree.n_treated[i] < params.min_arm or tree.n_control[i] < params.min_arm:
                violations.append(f"leaf {i}: arms ({tree.n_treated[i]}, {tree.n_control[i]})")
            continue
        parent = int(tree.n_train[i])
        if parent < 2 * params.k:
            violations.append(f"node {i}: split with {parent} < 2k training observations")
        floor = params.min_child_size(parent)
        for child in (tree.left[i], tree.right[i]):
            if tree.n_train[child] < floor:
                violations.append(
                    f"node {i}: child {child} holds {tree.n_train[child]} < {floor} observations"
                )
    return violations
