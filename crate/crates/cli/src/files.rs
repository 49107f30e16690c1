//! JSON state and tree files. Complex numbers are `[re, im]` pairs.

use entroof::locc::{LoccNode, Party};
use entroof::{BipartiteDims, Complex, Density, Matrix, State};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct DimsFile {
    #[serde(rename = "dimA")]
    pub dim_a: usize,
    #[serde(rename = "dimB")]
    pub dim_b: usize,
}

impl DimsFile {
    pub fn to_dims(self) -> Result<BipartiteDims, CliError> {
        BipartiteDims::new(self.dim_a, self.dim_b).map_err(|e| CliError::malformed(format!("dims: {e}")))
    }
}

impl From<BipartiteDims> for DimsFile {
    fn from(d: BipartiteDims) -> Self {
        Self { dim_a: d.dim_a(), dim_b: d.dim_b() }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Pure,
    Density,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum StateData {
    Vector(Vec<[f64; 2]>),
    Matrix(Vec<Vec<[f64; 2]>>),
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct StateFile {
    pub kind: StateKind,
    pub dims: DimsFile,
    pub data: StateData,
}

/// Parsed state file contents.
#[derive(Clone, Debug)]
pub enum LoadedState {
    Pure(State),
    Density(Density),
}

impl LoadedState {
    pub fn to_density(&self) -> Density {
        match self {
            LoadedState::Pure(p) => p.to_density(),
            LoadedState::Density(d) => d.clone(),
        }
    }

    pub fn dims(&self) -> BipartiteDims {
        match self {
            LoadedState::Pure(p) => p.dims(),
            LoadedState::Density(d) => d.dims(),
        }
    }
}

pub fn complex(pair: [f64; 2]) -> Complex<f64> {
    Complex::new(pair[0], pair[1])
}

pub fn pair(z: Complex<f64>) -> [f64; 2] {
    [z.re, z.im]
}

pub fn matrix_rows(m: &Matrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.rows()).map(|i| m.row(i).iter().map(|z| pair(*z)).collect()).collect()
}

fn parse_matrix(rows: &[Vec<[f64; 2]>], what: &str) -> Result<Matrix, CliError> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|row| row.len() != c) {
        return Err(CliError::malformed(format!("{what}: ragged matrix rows")));
    }
    let data = rows.iter().flatten().map(|p| complex(*p)).collect();
    Matrix::new(r, c, data).map_err(|e| CliError::malformed(format!("{what}: {e}")))
}

impl StateFile {
    pub fn from_pure(psi: &State) -> Self {
        Self {
            kind: StateKind::Pure,
            dims: psi.dims().into(),
            data: StateData::Vector(psi.amplitudes().iter().map(|z| pair(*z)).collect()),
        }
    }

    pub fn from_density(rho: &Density) -> Self {
        Self { kind: StateKind::Density, dims: rho.dims().into(), data: StateData::Matrix(matrix_rows(rho.matrix())) }
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::malformed(format!("state file: {e}")))
    }

    /// Validates the contents against the pure-state or density invariants.
    pub fn load(&self) -> Result<LoadedState, CliError> {
        let dims = self.dims.to_dims()?;
        match (&self.kind, &self.data) {
            (StateKind::Pure, StateData::Vector(v)) => {
                let amps = v.iter().map(|p| complex(*p)).collect();
                State::new(amps, dims)
                    .map(LoadedState::Pure)
                    .map_err(|e| CliError::malformed(format!("pure state: {e}")))
            }
            (StateKind::Density, StateData::Matrix(rows)) => {
                let m = parse_matrix(rows, "density matrix")?;
                Density::new(m, dims)
                    .map(LoadedState::Density)
                    .map_err(|e| CliError::malformed(format!("density: {e}")))
            }
            (StateKind::Pure, _) => Err(CliError::malformed("pure state data must be a vector of [re, im] pairs")),
            (StateKind::Density, _) => Err(CliError::malformed("density data must be a matrix of [re, im] pairs")),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize, PartialEq, Eq)]
pub enum PartyFile {
    #[default]
    Alice,
    Bob,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
pub struct NodeFile {
    #[serde(default)]
    pub party: PartyFile,
    #[serde(default)]
    pub kraus: Vec<Vec<Vec<[f64; 2]>>>,
    #[serde(default)]
    pub children: Vec<NodeFile>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TreeFile {
    pub dims: DimsFile,
    pub root: NodeFile,
}

impl NodeFile {
    pub fn from_node(node: &LoccNode<f64>) -> Self {
        Self {
            party: match node.party {
                Party::Alice => PartyFile::Alice,
                Party::Bob => PartyFile::Bob,
            },
            kraus: node.kraus.iter().map(matrix_rows).collect(),
            children: node.children.iter().map(Self::from_node).collect(),
        }
    }

    pub fn to_node(&self) -> Result<LoccNode<f64>, CliError> {
        let party = match self.party {
            PartyFile::Alice => Party::Alice,
            PartyFile::Bob => Party::Bob,
        };
        let kraus = self.kraus.iter().map(|k| parse_matrix(k, "Kraus operator")).collect::<Result<_, _>>()?;
        let children = self.children.iter().map(Self::to_node).collect::<Result<_, _>>()?;
        Ok(LoccNode::with_children(party, kraus, children))
    }
}

impl TreeFile {
    pub fn new(dims: BipartiteDims, root: &LoccNode<f64>) -> Self {
        Self { dims: dims.into(), root: NodeFile::from_node(root) }
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::malformed(format!("tree file: {e}")))
    }

    pub fn load(&self) -> Result<(BipartiteDims, LoccNode<f64>), CliError> {
        Ok((self.dims.to_dims()?, self.root.to_node()?))
    }
}
