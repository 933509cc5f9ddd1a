"""Graph features, relative-performance scoring and a Gini decision tree.

The tree is trained with weighted Gini splits, grown until leaves are pure, and
pruned by minimal cost-complexity with the pruning strength picked by
family-stratified cross validation.
"""

from __future__ import annotations

import csv
import io
import math
import random
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Hashable, Sequence

from .graph import Graph

FEATURE_NAMES: tuple[str, ...] = (
    "nodes",
    "terminal_arcs",
    "neighbor_arcs",
    "is_grid",
    *(
        f"{prop}_{stat}"
        for prop in ("source_cap", "sink_cap", "terminal_cap", "neighbor_cap", "in_cap", "out_cap", "total_cap")
        for stat in ("mean", "std", "std_nz")
    ),
    *(f"{prop}_{stat}" for prop in ("degree", "out_degree", "in_degree") for stat in ("mean", "std")),
)
FEATURE_COUNT = len(FEATURE_NAMES)
assert FEATURE_COUNT == 31


def _stats(values: Sequence[int], norm: Fraction | None) -> tuple[float, float, float]:
    """(mean, std, std of non-zero values), divided by `norm` when given.

    Ratios are formed exactly, so scaling every value and `norm` by the same
    factor gives bit-identical output.
    """
    if not values:
        return 0.0, 0.0, 0.0
    if norm is not None and norm == 0:
        return 0.0, 0.0, 0.0

    def mean_var(xs):
        if not xs:
            return Fraction(0), Fraction(0)
        mu = Fraction(sum(xs), len(xs))
        var = Fraction(sum(x * x for x in xs), len(xs)) - mu * mu
        return mu, var

    mu, var = mean_var(values)
    _, var_nz = mean_var([x for x in values if x != 0])
    if norm is not None:
        mu /= norm
        var /= norm * norm
        var_nz /= norm * norm
    return float(mu), math.sqrt(var), math.sqrt(var_nz)


def extract_features(g: Graph, is_grid: bool = False) -> list[float]:
    """31-entry feature vector (see FEATURE_NAMES) of a built graph.

    Terminal statistics use the folded per-node capacities the graph stores.
    Arc populations: one source and one sink slot per node, one slot per
    stored half-arc. Degrees count only half-arcs with non-zero capacity.
    """
    n = g.n
    src = [t if t > 0 else 0 for t in g.tr_orig]
    snk = [-t if t < 0 else 0 for t in g.tr_orig]
    cap = g.cap
    tail, head = g.tail, g.head
    in_cap = [0] * n
    out_cap = [0] * n
    in_deg = [0] * n
    out_deg = [0] * n
    for a, c in enumerate(cap):
        if c:
            out_cap[tail[a]] += c
            in_cap[head[a]] += c
            out_deg[tail[a]] += 1
            in_deg[head[a]] += 1
    nonzero = [c for c in (*src, *snk, *cap) if c]
    norm = Fraction(sum(nonzero), len(nonzero)) if nonzero else Fraction(0)
    total_cap = [a + b for a, b in zip(in_cap, out_cap)]
    degree = [a + b for a, b in zip(in_deg, out_deg)]

    out: list[float] = [
        float(n),
        float(sum(1 for c in src if c) + sum(1 for c in snk if c)),
        float(sum(1 for c in cap if c)),
        1.0 if is_grid else 0.0,
    ]
    for vals in (src, snk, src + snk, cap, in_cap, out_cap, total_cap):
        out.extend(_stats(vals, norm))
    for vals in (degree, out_deg, in_deg):
        out.extend(_stats(vals, None)[:2])
    return out


def features_csv(rows: Sequence[tuple[str, Sequence[float]]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["dataset", *FEATURE_NAMES])
    for name, f in rows:
        w.writerow([name, *(repr(x) for x in f)])
    return buf.getvalue()


def read_features_csv(text: str) -> list[tuple[str, list[float]]]:
    r = csv.reader(io.StringIO(text))
    header = next(r, None)
    if header is None or tuple(header[1:]) != FEATURE_NAMES:
        raise ValueError("feature CSV header does not match the 31-column layout")
    return [(row[0], [float(x) for x in row[1:]]) for row in r if row]


# -- relative performance ----------------------------------------------------


@dataclass
class RpSample:
    """Per-algorithm times of one dataset."""

    dataset: str
    family: str
    times: dict[str, float]
    features: list[float] | None = None

    def __post_init__(self):
        if not self.times:
            raise ValueError("sample needs at least one algorithm time")
        for alg, t in self.times.items():
            if not t > 0:
                raise ValueError(f"time for {alg!r} must be positive")

    @property
    def fastest(self) -> str:
        return min(sorted(self.times), key=lambda a: self.times[a])


def rp_score(s: RpSample, selected: str) -> float:
    """Fastest time divided by the selected algorithm's time."""
    if selected not in s.times:
        raise KeyError(f"algorithm {selected!r} missing from sample {s.dataset!r}")
    return min(s.times.values()) / s.times[selected]


def _family_mean(values: Sequence[float], families: Sequence[Hashable]) -> float:
    """Average in which every family carries equal total weight.

    Equivalent to oversampling each family to a common size.
    """
    groups: dict[Hashable, list[float]] = defaultdict(list)
    for v, f in zip(values, families):
        groups[f].append(v)
    if not groups:
        raise ValueError("no samples")
    return sum(sum(vs) / len(vs) for vs in groups.values()) / len(groups)


def mean_rp(samples: Sequence[RpSample], strategy: Callable[[RpSample], str]) -> float:
    return _family_mean([rp_score(s, strategy(s)) for s in samples], [s.family for s in samples])


# -- decision tree -----------------------------------------------------------


@dataclass
class TreeNode:
    label: str | None = None  # majority class; the prediction on leaves
    feature: int = -1
    threshold: float = 0.0
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None
    # training bookkeeping, unused by predict
    weight: float = 0.0
    impurity: float = 0.0

    @property
    def is_leaf(self) -> bool:
        return self.left is None


@dataclass
class DecisionTree:
    root: TreeNode
    feature_count: int = FEATURE_COUNT
    alpha: float = 0.0

    def depth(self) -> int:
        def d(t):
            return 0 if t.is_leaf else 1 + max(d(t.left), d(t.right))

        return d(self.root)

    def leaves(self) -> list[TreeNode]:
        out = []
        stack = [self.root]
        while stack:
            t = stack.pop()
            if t.is_leaf:
                out.append(t)
            else:
                stack += [t.right, t.left]
        return out


def gini(weights: dict[str, float]) -> float:
    total = sum(weights.values())
    if total <= 0:
        return 0.0
    return 1.0 - sum((w / total) ** 2 for w in weights.values())


def _class_weights(idx, y, w) -> dict[str, float]:
    out: dict[str, float] = defaultdict(float)
    for i in idx:
        out[y[i]] += w[i]
    return out


def _majority(cw: dict[str, float]) -> str:
    # heaviest class; ties to the smallest label
    return min(cw, key=lambda c: (-cw[c], c))


def _grow(X, y, w, idx: list[int]) -> TreeNode:
    cw = _class_weights(idx, y, w)
    node = TreeNode(label=_majority(cw), weight=sum(cw.values()), impurity=gini(cw))
    if node.impurity <= 1e-15 or len(idx) < 2:
        return node
    best = None  # (score, feature, threshold)
    parent_w = node.weight
    for k in range(len(X[0])):
        order = sorted(idx, key=lambda i: X[i][k])
        left: dict[str, float] = defaultdict(float)
        right = dict(cw)
        lw = 0.0
        for pos in range(len(order) - 1):
            i = order[pos]
            left[y[i]] += w[i]
            right[y[i]] -= w[i]
            lw += w[i]
            a, b = X[i][k], X[order[pos + 1]][k]
            if a == b:
                continue
            rw = parent_w - lw
            score = lw * gini(left) + rw * gini(right)
            if best is None or score < best[0] - 1e-12:
                best = (score, k, (a + b) / 2)
    if best is None:  # identical feature rows, cannot separate
        return node
    _, k, thr = best
    li = [i for i in idx if X[i][k] < thr]
    ri = [i for i in idx if X[i][k] >= thr]
    node.feature, node.threshold = k, thr
    node.left = _grow(X, y, w, li)
    node.right = _grow(X, y, w, ri)
    return node


def _subtree_cost(t: TreeNode) -> tuple[float, int]:
    """(sum of weighted leaf impurity, leaf count)."""
    if t.is_leaf:
        return t.weight * t.impurity, 1
    a, na = _subtree_cost(t.left)
    b, nb = _subtree_cost(t.right)
    return a + b, na + nb


def _copy(t: TreeNode) -> TreeNode:
    c = TreeNode(t.label, t.feature, t.threshold, None, None, t.weight, t.impurity)
    if not t.is_leaf:
        c.left, c.right = _copy(t.left), _copy(t.right)
    return c


def pruning_path(root: TreeNode) -> list[tuple[float, TreeNode]]:
    """Minimal cost-complexity sequence: (alpha, tree) with alpha increasing.

    The first entry is the full tree at alpha 0, the last a single leaf.
    """
    t = _copy(root)
    path = [(0.0, _copy(t))]
    while not t.is_leaf:
        # weakest link: smallest (R(leaf) - R(subtree)) / (leaves - 1)
        best = None
        stack = [t]
        while stack:
            u = stack.pop()
            if u.is_leaf:
                continue
            r_sub, leaves = _subtree_cost(u)
            g = (u.weight * u.impurity - r_sub) / (leaves - 1)
            if best is None or g < best[0] - 1e-12:
                best = (g, u)
            stack += [u.left, u.right]
        g, u = best
        u.left = u.right = None
        alpha = max(g, path[-1][0])
        path.append((alpha, _copy(t)))
    return path


def prune(root: TreeNode, alpha: float) -> TreeNode:
    chosen = root
    for a, t in pruning_path(root):
        if a <= alpha + 1e-12:
            chosen = t
        else:
            break
    return chosen


def _fill_labels(root: TreeNode, X, y, w, idx) -> None:
    """Recompute leaf majority labels from training data (after pruning)."""
    cw = _class_weights(idx, y, w)
    if root.is_leaf:
        root.label = _majority(cw) if cw else root.label
        return
    k, thr = root.feature, root.threshold
    _fill_labels(root.left, X, y, w, [i for i in idx if X[i][k] < thr])
    _fill_labels(root.right, X, y, w, [i for i in idx if X[i][k] >= thr])


def _fit_full(X, y, family) -> tuple[TreeNode, list[float]]:
    size = defaultdict(int)
    for f in family:
        size[f] += 1
    w = [1.0 / size[f] for f in family]
    root = _grow(X, y, w, list(range(len(y))))
    return root, w


def _pruned(root, X, y, w, alpha) -> TreeNode:
    t = prune(root, alpha)
    _fill_labels(t, X, y, w, list(range(len(y))))
    return t


def stratified_folds(family: Sequence[Hashable], folds: int, seed: int = 0) -> list[int]:
    """Fold id per sample; each family is dealt round-robin over the folds."""
    rng = random.Random(seed)
    fold = [0] * len(family)
    groups: dict[Hashable, list[int]] = defaultdict(list)
    for i, f in enumerate(family):
        groups[f].append(i)
    start = 0
    for f in sorted(groups, key=str):
        members = groups[f]
        rng.shuffle(members)
        for k, i in enumerate(members):
            fold[i] = (start + k) % folds
        start += len(members)
    return fold


def train_tree(
    X: Sequence[Sequence[float]],
    y: Sequence[str],
    family: Sequence[Hashable],
    folds: int = 5,
    samples: Sequence[RpSample] | None = None,
    seed: int = 0,
) -> DecisionTree:
    """Fit, then prune with the alpha that maximizes cross-validated score.

    The score is the family-balanced mean RP when `samples` (aligned with X)
    supply per-algorithm times, else family-balanced accuracy. Ties go to the
    larger alpha, i.e. the smaller tree.
    """
    if not (len(X) == len(y) == len(family)) or not X:
        raise ValueError("X, y and family must be non-empty and aligned")
    width = len(X[0])
    if any(len(r) != width for r in X):
        raise ValueError("ragged feature matrix")
    if samples is not None and len(samples) != len(y):
        raise ValueError("samples must align with X")
    X = [list(map(float, r)) for r in X]
    y = list(y)
    family = list(family)
    root, w = _fit_full(X, y, family)
    if root.is_leaf:
        return DecisionTree(root, width, 0.0)
    path = pruning_path(root)
    alphas = [a for a, _ in path]
    # one representative alpha per interval of the path
    candidates = [
        math.sqrt(alphas[i] * alphas[i + 1]) if alphas[i] > 0 else alphas[i + 1] / 2
        for i in range(len(alphas) - 1)
    ] + [alphas[-1]]
    candidates[0] = 0.0

    def score(t: TreeNode, idx: list[int]) -> float:
        vals = []
        for i in idx:
            pick = _descend(t, X[i])
            if samples is not None:
                vals.append(rp_score(samples[i], pick) if pick in samples[i].times else 0.0)
            else:
                vals.append(1.0 if pick == y[i] else 0.0)
        return _family_mean(vals, [family[i] for i in idx])

    folds = max(2, min(folds, len(y)))
    fold_of = stratified_folds(family, folds, seed)
    totals = [0.0] * len(candidates)
    used = 0
    for f in range(folds):
        tr = [i for i in range(len(y)) if fold_of[i] != f]
        va = [i for i in range(len(y)) if fold_of[i] == f]
        if not tr or not va:
            continue
        used += 1
        sub, sw = _fit_full([X[i] for i in tr], [y[i] for i in tr], [family[i] for i in tr])
        Xt, yt = [X[i] for i in tr], [y[i] for i in tr]
        for c, a in enumerate(candidates):
            t = _pruned(sub, Xt, yt, sw, a)
            totals[c] += score(t, va)
    best_c = 0
    if used:
        best_c = max(range(len(candidates)), key=lambda c: (round(totals[c], 12), c))
    alpha = candidates[best_c]
    t = _pruned(root, X, y, w, alpha)
    return DecisionTree(t, width, alpha)


def weighted_impurity(t: DecisionTree) -> float:
    return _subtree_cost(t.root)[0]


def _descend(t: TreeNode, f: Sequence[float]) -> str:
    while not t.is_leaf:
        t = t.left if f[t.feature] < t.threshold else t.right
    return t.label


def predict(t: DecisionTree, f: Sequence[float]) -> str:
    """Leaf label for `f`; values equal to a threshold go right."""
    if len(f) != t.feature_count:
        raise ValueError(f"feature vector has {len(f)} entries, tree expects {t.feature_count}")
    return _descend(t.root, f)


# -- text format -------------------------------------------------------------


def save_tree(t: DecisionTree) -> str:
    lines = [f"features {t.feature_count}"]
    counter = [0]

    def emit(u: TreeNode) -> int:
        my = counter[0]
        counter[0] += 1
        if u.is_leaf:
            lines.append(f"leaf {my} label {u.label}")
            return my
        slot = len(lines)
        lines.append("")
        left = emit(u.left)
        right = emit(u.right)
        lines[slot] = f"node {my} feature {u.feature} threshold {u.threshold!r} left {left} right {right}"
        return my

    emit(t.root)
    return "\n".join(lines) + "\n"


def load_tree(text: str) -> DecisionTree:
    """Parse the line format; the root is the first node or leaf listed."""
    internal: dict[int, tuple[int, float, int, int]] = {}
    leaves: dict[int, str] = {}
    order: list[int] = []
    seen: set[int] = set()
    width = FEATURE_COUNT
    for lineno, raw in enumerate(text.splitlines(), 1):
        parts = raw.split()
        if not parts or parts[0].startswith("#"):
            continue
        try:
            if parts[0] == "features" and len(parts) == 2:
                width = int(parts[1])
                continue
            if parts[0] == "leaf" and len(parts) == 4 and parts[2] == "label":
                nid = int(parts[1])
                leaves[nid] = parts[3]
            elif parts[0] == "node" and len(parts) == 10 and parts[2::2] == ["feature", "threshold", "left", "right"]:
                nid = int(parts[1])
                internal[nid] = (int(parts[3]), float(parts[5]), int(parts[7]), int(parts[9]))
            else:
                raise ValueError
        except ValueError:
            raise ValueError(f"line {lineno}: malformed tree line {raw!r}") from None
        if nid in seen:
            raise ValueError(f"line {lineno}: duplicate id {nid}")
        seen.add(nid)
        order.append(nid)
    if not order:
        raise ValueError("empty tree file")

    def build(nid: int, depth: int) -> TreeNode:
        if depth > len(order):
            raise ValueError("tree file contains a cycle")
        if nid in leaves:
            return TreeNode(label=leaves[nid])
        if nid not in internal:
            raise ValueError(f"reference to undefined id {nid}")
        k, thr, left, right = internal[nid]
        if not 0 <= k < width:
            raise ValueError(f"feature index {k} out of range")
        return TreeNode(feature=k, threshold=thr, left=build(left, depth + 1), right=build(right, depth + 1))

    return DecisionTree(build(order[0], 0), width)
