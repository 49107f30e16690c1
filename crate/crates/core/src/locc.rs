//! LOCC protocols as trees of party-local Kraus instruments.
//!
//! A node applies one instrument `{K_y}` on the acting party's current
//! space; branch `y` continues with child `y`. Node ids are index paths from
//! the root (`[]`), zero-based. Kraus operators are stored on the local space
//! only and lifted to `K ⊗ I` or `I ⊗ K` at application time, so local
//! dimensions may change from one round to the next.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::{lift_local, BipartiteDims, ComplexMatrix, DensityOperator, Side};
use crate::measures::MeasureSpec;
use crate::roof::{solve_roof, Direction, PureObjective, RoofOptions, RoofProblem};
use crate::scalar::Real;

/// Completeness tolerance for `Σ K†K = I`.
pub const COMPLETENESS_TOL: f64 = 1e-10;
/// Branches whose probability falls below this are skipped by audits.
pub const PRUNE_PROBABILITY: f64 = 1e-12;

pub type NodeId = Vec<usize>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Party {
    Alice,
    Bob,
}

impl Party {
    pub fn side(self) -> Side {
        match self {
            Party::Alice => Side::A,
            Party::Bob => Side::B,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LoccNode<R> {
    pub party: Party,
    pub kraus: Vec<ComplexMatrix<R>>,
    pub children: Vec<LoccNode<R>>,
}

impl<R: Real> LoccNode<R> {
    pub fn leaf() -> Self {
        Self { party: Party::Alice, kraus: Vec::new(), children: Vec::new() }
    }

    /// One instrument whose branches all terminate.
    pub fn instrument(party: Party, kraus: Vec<ComplexMatrix<R>>) -> Self {
        let children = kraus.iter().map(|_| Self::leaf()).collect();
        Self { party, kraus, children }
    }

    pub fn with_children(party: Party, kraus: Vec<ComplexMatrix<R>>, children: Vec<LoccNode<R>>) -> Self {
        Self { party, kraus, children }
    }

    /// Single node applying the identity, i.e. doing nothing.
    pub fn identity(party: Party, local_dim: usize) -> Self {
        Self::instrument(party, vec![ComplexMatrix::identity(local_dim)])
    }

    pub fn is_leaf(&self) -> bool {
        self.kraus.is_empty() && self.children.is_empty()
    }

    pub fn get(&self, id: &[usize]) -> Option<&LoccNode<R>> {
        match id.split_first() {
            None => Some(self),
            Some((first, rest)) => self.children.get(*first)?.get(rest),
        }
    }

    /// All node ids in pre-order (lexicographic path order).
    pub fn node_ids(&self) -> Vec<NodeId> {
        let mut out = Vec::new();
        self.collect_ids(&mut Vec::new(), &mut out);
        out
    }

    fn collect_ids(&self, prefix: &mut NodeId, out: &mut Vec<NodeId>) {
        out.push(prefix.clone());
        for (i, child) in self.children.iter().enumerate() {
            prefix.push(i);
            child.collect_ids(prefix, out);
            prefix.pop();
        }
    }

    /// Leaves found by walking the structure.
    pub fn structural_leaves(&self) -> Vec<NodeId> {
        self.node_ids().into_iter().filter(|id| self.get(id).is_some_and(|n| n.children.is_empty())).collect()
    }

    pub fn depth(&self) -> usize {
        self.children.iter().map(|c| 1 + c.depth()).max().unwrap_or(0)
    }
}

/// `x ≺ y`: `x` is a proper prefix of `y`.
pub fn precedes(x: &[usize], y: &[usize]) -> bool {
    x.len() < y.len() && y[..x.len()] == *x
}

/// `I(x)`: elements of `ids` extending `x` by exactly one index.
pub fn immediate_successors(ids: &[NodeId], x: &[usize]) -> Vec<NodeId> {
    ids.iter().filter(|y| y.len() == x.len() + 1 && precedes(x, y)).cloned().collect()
}

/// `ℱ(𝒯)`: elements of `ids` with no immediate successor.
pub fn final_nodes(ids: &[NodeId]) -> Vec<NodeId> {
    ids.iter().filter(|x| immediate_successors(ids, x).is_empty()).cloned().collect()
}

#[derive(Clone, Debug, PartialEq)]
pub enum IssueKind {
    /// `‖Σ K†K − I‖_max` exceeds the tolerance.
    Incomplete {
        residual: f64,
    },
    DimensionMismatch {
        detail: String,
    },
    Malformed {
        detail: String,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Issue {
    pub node: NodeId,
    pub kind: IssueKind,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }
}

/// Checks completeness, shapes and structure of every node. Never fails;
/// problems are collected in the report.
pub fn validate_tree<R: Real>(tree: &LoccNode<R>, dims: BipartiteDims) -> ValidationReport {
    let mut report = ValidationReport::default();
    validate_node(tree, dims, &mut Vec::new(), &mut report);
    report
}

fn validate_node<R: Real>(node: &LoccNode<R>, dims: BipartiteDims, id: &mut NodeId, report: &mut ValidationReport) {
    let mut push = |kind| report.issues.push(Issue { node: id.clone(), kind });
    if node.kraus.is_empty() {
        if !node.children.is_empty() {
            push(IssueKind::Malformed { detail: format!("{} children but no Kraus operators", node.children.len()) });
        }
        return;
    }
    if node.children.len() != node.kraus.len() {
        push(IssueKind::Malformed {
            detail: format!("{} Kraus operators but {} children", node.kraus.len(), node.children.len()),
        });
    }
    let side = node.party.side();
    let local = dims.dim(side);
    let mut shapes_ok = true;
    for (y, k) in node.kraus.iter().enumerate() {
        if k.cols() != local {
            shapes_ok = false;
            push(IssueKind::DimensionMismatch {
                detail: format!("Kraus operator {y} has {} columns, {:?} has dimension {local}", k.cols(), node.party),
            });
        }
    }
    if shapes_ok {
        let mut sum = ComplexMatrix::zeros(local, local);
        for k in &node.kraus {
            sum = &sum + &k.adjoint().mul_unchecked(k);
        }
        let residual = sum.max_abs_diff(&ComplexMatrix::identity(local));
        if residual > R::tol(COMPLETENESS_TOL) {
            push(IssueKind::Incomplete { residual: residual.as_f64() });
        }
    }
    for (y, (child, k)) in node.children.iter().zip(&node.kraus).enumerate() {
        let out = k.rows();
        let child_dims = match side {
            Side::A => BipartiteDims::new(out, dims.dim_b()),
            Side::B => BipartiteDims::new(dims.dim_a(), out),
        };
        if let Ok(cd) = child_dims {
            id.push(y);
            validate_node(child, cd, id, report);
            id.pop();
        }
    }
}

/// Unnormalized branch state `ρ_x` with its absolute probability.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchState<R> {
    pub node: NodeId,
    pub dims: BipartiteDims,
    pub unnormalized: ComplexMatrix<R>,
    /// `Tr ρ_x`, the probability of reaching `x`.
    pub probability: R,
    /// Probability of `x` given its parent.
    pub conditional: R,
}

impl<R: Real> BranchState<R> {
    pub fn normalized(&self) -> Result<DensityOperator<R>> {
        DensityOperator::from_unnormalized(&self.unnormalized, self.dims)
    }
}

#[derive(Clone, Debug)]
pub struct TreeRun<R> {
    /// `levels[k]` holds every node at depth `k`, in id order.
    pub levels: Vec<Vec<BranchState<R>>>,
    pub output: DensityOperator<R>,
    pub final_nodes: Vec<NodeId>,
}

impl<R: Real> TreeRun<R> {
    pub fn branch(&self, id: &[usize]) -> Option<&BranchState<R>> {
        self.levels.get(id.len())?.iter().find(|b| b.node == id)
    }

    /// Probability mass of the frontier at each depth: nodes at that depth
    /// plus final nodes reached earlier. Each entry equals one for a
    /// trace-preserving tree.
    pub fn level_sums(&self) -> Vec<R> {
        let mut carried = R::zero();
        let mut out = Vec::with_capacity(self.levels.len());
        for level in &self.levels {
            let here: R = level.iter().map(|b| b.probability).sum();
            out.push(carried + here);
            carried =
                carried + level.iter().filter(|b| self.final_nodes.contains(&b.node)).map(|b| b.probability).sum();
        }
        out
    }

    /// Largest `|Σ_y Tr ρ_y − Tr ρ_x|` over non-final nodes.
    pub fn max_sibling_defect(&self) -> R {
        let mut worst = R::zero();
        for (depth, level) in self.levels.iter().enumerate().skip(1) {
            let mut by_parent: BTreeMap<&[usize], R> = BTreeMap::new();
            for b in level {
                *by_parent.entry(&b.node[..depth - 1]).or_insert(R::zero()) =
                    by_parent.get(&b.node[..depth - 1]).copied().unwrap_or(R::zero()) + b.probability;
            }
            for (parent, sum) in by_parent {
                let p = self.branch(parent).map(|b| b.probability).unwrap_or(R::zero());
                worst = worst.max((sum - p).abs());
            }
        }
        worst
    }
}

/// Executes the protocol on `rho`, producing every branch state and the
/// channel output `Λ(ρ) = Σ_{leaves} ρ_x`.
pub fn run_tree<R: Real>(tree: &LoccNode<R>, rho: &DensityOperator<R>) -> Result<TreeRun<R>> {
    let report = validate_tree(tree, rho.dims());
    if !report.is_valid() {
        return Err(Error::InvalidTree(report));
    }
    let mut levels: Vec<Vec<BranchState<R>>> = Vec::new();
    let root = BranchState {
        node: Vec::new(),
        dims: rho.dims(),
        unnormalized: rho.matrix().clone(),
        probability: R::one(),
        conditional: R::one(),
    };
    let mut leaves = Vec::new();
    descend(tree, root, &mut levels, &mut leaves)?;

    let dims = leaves[0].dims;
    if leaves.iter().any(|b| b.dims != dims) {
        return Err(Error::DimensionMismatch("final nodes carry different local dimensions".into()));
    }
    let mut sum = ComplexMatrix::zeros(dims.total(), dims.total());
    for b in &leaves {
        sum = &sum + &b.unnormalized;
    }
    let output = DensityOperator::new(sum, dims)?;
    Ok(TreeRun { levels, output, final_nodes: leaves.into_iter().map(|b| b.node).collect() })
}

fn descend<R: Real>(
    node: &LoccNode<R>,
    state: BranchState<R>,
    levels: &mut Vec<Vec<BranchState<R>>>,
    leaves: &mut Vec<BranchState<R>>,
) -> Result<()> {
    let depth = state.node.len();
    if levels.len() <= depth {
        levels.resize_with(depth + 1, Vec::new);
    }
    levels[depth].push(state.clone());
    if node.children.is_empty() {
        leaves.push(state);
        return Ok(());
    }
    let side = node.party.side();
    for (y, (k, child)) in node.kraus.iter().zip(&node.children).enumerate() {
        let lifted = lift_local(k, state.dims, side)?;
        let unnormalized = crate::linalg::hermitian_part(&lifted.conjugate_onto(&state.unnormalized)?);
        let probability = unnormalized.trace().re.max(R::zero());
        let conditional = if state.probability > R::zero() { probability / state.probability } else { R::zero() };
        let dims = match side {
            Side::A => BipartiteDims::new(k.rows(), state.dims.dim_b())?,
            Side::B => BipartiteDims::new(state.dims.dim_a(), k.rows())?,
        };
        let mut id = state.node.clone();
        id.push(y);
        descend(child, BranchState { node: id, dims, unnormalized, probability, conditional }, levels, leaves)?;
    }
    Ok(())
}

/// Measure value at one branch, with its provenance.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchValue<R> {
    pub value: R,
    /// Roof gap estimate; zero for exact pure-state evaluation.
    pub gap: R,
    pub exact: bool,
}

/// One inequality `μ(ρ_x) ≥ Σ_y p(y|x) μ(ρ_y)` (reversed for increasing measures).
#[derive(Clone, Debug, PartialEq)]
pub struct NodeAudit<R> {
    pub node: NodeId,
    pub parent: BranchValue<R>,
    pub children_average: R,
    /// `parent − average` for decreasing measures, `average − parent` for increasing ones.
    pub slack: R,
    /// Sum of gap estimates involved in this inequality.
    pub gap_sum: R,
    pub exact: bool,
    pub violation: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EndToEnd<R> {
    pub input: BranchValue<R>,
    pub output: BranchValue<R>,
    pub slack: R,
    pub violation: bool,
}

#[derive(Clone, Debug)]
pub struct AuditReport<R> {
    pub rows: Vec<NodeAudit<R>>,
    pub values: BTreeMap<NodeId, BranchValue<R>>,
    pub pruned: Vec<NodeId>,
    /// `None` when only the node inequalities were audited.
    pub end_to_end: Option<EndToEnd<R>>,
    pub run: TreeRun<R>,
}

impl<R: Real> AuditReport<R> {
    pub fn min_slack(&self) -> R {
        self.rows.iter().map(|r| r.slack).fold(R::infinity(), R::min)
    }

    pub fn has_violation(&self) -> bool {
        self.rows.iter().any(|r| r.violation) || self.end_to_end.as_ref().is_some_and(|e| e.violation)
    }
}

/// Margin beyond the gap estimates before an apparent violation is reported.
pub const VIOLATION_MARGIN: f64 = 1e-6;

/// Evaluates `measure` on a normalized state: exactly when it has rank one,
/// otherwise by the roof in the measure's natural direction.
pub fn evaluate_state<R: Real>(
    rho: &DensityOperator<R>,
    measure: &MeasureSpec,
    options: &RoofOptions,
) -> Result<BranchValue<R>> {
    if let Some(psi) = rho.as_pure() {
        return Ok(BranchValue { value: measure.evaluate(&psi)?, gap: R::zero(), exact: true });
    }
    let direction = if measure.is_increasing() { Direction::Maximize } else { Direction::Minimize };
    let problem = RoofProblem {
        rho: rho.clone(),
        objective: PureObjective::Measure(measure.clone()),
        direction,
        options: options.clone(),
    };
    let res = solve_roof(&problem)?;
    Ok(BranchValue { value: res.value, gap: res.gap_estimate, exact: false })
}

/// Checks the averaged monotonicity inequality at every non-final node and
/// the end-to-end inequality `μ(ρ) ≥ μ(Λ(ρ))`.
pub fn audit_monotonicity<R: Real>(
    tree: &LoccNode<R>,
    rho: &DensityOperator<R>,
    measure: &MeasureSpec,
    options: &RoofOptions,
) -> Result<AuditReport<R>> {
    let mut report = audit_nodes(tree, rho, measure, options)?;
    let input = report.values.get(&Vec::new()).cloned().expect("root has probability one");
    let output = evaluate_state(&report.run.output, measure, options)?;
    let slack = orient(measure, input.value, output.value);
    let violation = slack < -(input.gap + output.gap + R::lit(VIOLATION_MARGIN));
    report.end_to_end = Some(EndToEnd { input, output, slack, violation });
    Ok(report)
}

fn orient<R: Real>(measure: &MeasureSpec, parent: R, other: R) -> R {
    if measure.is_increasing() {
        other - parent
    } else {
        parent - other
    }
}

/// The node inequalities of [`audit_monotonicity`] alone. The channel output,
/// usually mixed even for pure inputs, is not evaluated.
pub fn audit_nodes<R: Real>(
    tree: &LoccNode<R>,
    rho: &DensityOperator<R>,
    measure: &MeasureSpec,
    options: &RoofOptions,
) -> Result<AuditReport<R>> {
    let run = run_tree(tree, rho)?;
    let prune = R::lit(PRUNE_PROBABILITY);

    let mut values: BTreeMap<NodeId, BranchValue<R>> = BTreeMap::new();
    let mut pruned = Vec::new();
    for level in &run.levels {
        for b in level {
            if b.probability < prune {
                pruned.push(b.node.clone());
                continue;
            }
            values.insert(b.node.clone(), evaluate_state(&b.normalized()?, measure, options)?);
        }
    }

    let mut rows = Vec::new();
    for (id, parent) in &values {
        let node = tree.get(id).expect("branch ids come from the tree");
        if node.children.is_empty() {
            continue;
        }
        let mut average = R::zero();
        let mut gap_sum = parent.gap;
        let mut exact = parent.exact;
        for y in 0..node.children.len() {
            let mut cid = id.clone();
            cid.push(y);
            if let Some(v) = values.get(&cid) {
                let cond = run.branch(&cid).map(|b| b.conditional).unwrap_or(R::zero());
                average = average + cond * v.value;
                gap_sum = gap_sum + v.gap;
                exact = exact && v.exact;
            }
        }
        let slack = orient(measure, parent.value, average);
        let violation = slack < -(gap_sum + R::lit(VIOLATION_MARGIN));
        rows.push(NodeAudit {
            node: id.clone(),
            parent: parent.clone(),
            children_average: average,
            slack,
            gap_sum,
            exact,
            violation,
        });
    }

    Ok(AuditReport { rows, values, pruned, end_to_end: None, run })
}
