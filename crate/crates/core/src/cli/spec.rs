use std::path::PathBuf;
use std::str::FromStr;

use crate::coherence::ClusterSpec;
use crate::io::read_matrix_csv;
use crate::{Error, Frame, FrameKind, Result, Shape};

/// One frame of a dictionary spec: a built-in kind or `matrix:PATH`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FrameSpec {
    Builtin(FrameKind),
    Matrix(PathBuf),
}

impl FromStr for FrameSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Some(path) = s.strip_prefix("matrix:") {
            if path.is_empty() {
                return Err(Error::InvalidParameter("matrix: needs a file path".into()));
            }
            return Ok(FrameSpec::Matrix(PathBuf::from(path)));
        }
        let kind = match s {
            "dirac" => FrameKind::Dirac,
            "fourier" => FrameKind::Fourier,
            "dct" => FrameKind::Dct,
            "haar" => FrameKind::Haar1D,
            "haar2d" => FrameKind::Haar2D,
            "dct2d" => FrameKind::Dct2D,
            other => return Err(Error::InvalidParameter(format!("unknown frame '{other}'"))),
        };
        Ok(FrameSpec::Builtin(kind))
    }
}

/// `FRAME` or `FRAME+FRAME`, e.g. `fourier+dirac`, `haar2d+dct2d`,
/// `matrix:dict.csv`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DictSpec {
    pub first: FrameSpec,
    pub second: Option<FrameSpec>,
}

impl FromStr for DictSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split('+').collect();
        match parts.as_slice() {
            [a] => Ok(DictSpec { first: a.parse()?, second: None }),
            [a, b] => Ok(DictSpec { first: a.parse()?, second: Some(b.parse()?) }),
            _ => Err(Error::InvalidParameter(format!("dictionary spec '{s}' has more than two frames"))),
        }
    }
}

fn is_2d(kind: FrameKind) -> bool {
    matches!(kind, FrameKind::Haar2D | FrameKind::Dct2D)
}

impl DictSpec {
    /// Builds the frames. Built-in kinds take their size from `hint` (a 1D
    /// length `n` means `n x n` for the 2D kinds) or else from a matrix frame
    /// in the same spec.
    pub fn build(&self, hint: Option<Shape>) -> Result<(Frame, Option<Frame>)> {
        let specs: Vec<&FrameSpec> = std::iter::once(&self.first).chain(self.second.as_ref()).collect();
        let mut matrices = Vec::new();
        for spec in &specs {
            if let FrameSpec::Matrix(path) = spec {
                matrices.push(Frame::from_matrix(read_matrix_csv(path)?)?);
            }
        }
        let hint = hint.or_else(|| matrices.first().map(|m| Shape::Line(m.matrix().map_or(0, |a| a.nrows()))));
        let mut matrices = matrices.into_iter();
        let mut frames = Vec::new();
        for spec in specs {
            frames.push(match spec {
                FrameSpec::Matrix(_) => matrices.next().expect("loaded above"),
                FrameSpec::Builtin(kind) => {
                    let shape = hint.ok_or_else(|| {
                        Error::InvalidParameter(format!("{} needs a size (--n)", kind.name()))
                    })?;
                    let shape = match (shape, is_2d(*kind)) {
                        (Shape::Line(n), true) => Shape::Grid { rows: n, cols: n },
                        (Shape::Grid { .. }, false) => {
                            return Err(Error::InvalidParameter(format!("{} is a 1D frame but the input is 2D", kind.name())))
                        }
                        (s, _) => s,
                    };
                    Frame::new(*kind, shape)?
                }
            });
        }
        let mut frames = frames.into_iter();
        let first = frames.next().expect("at least one frame");
        Ok((first, frames.next()))
    }

    pub fn build_pair(&self, hint: Option<Shape>) -> Result<(Frame, Frame)> {
        match self.build(hint)? {
            (a, Some(b)) => Ok((a, b)),
            _ => Err(Error::InvalidParameter("this command needs a two-frame dictionary (A+B)".into())),
        }
    }
}

/// Parses a JSON array of zero-based indices, e.g. `[0, 3, 7]`.
pub fn parse_indices(s: &str) -> Result<Vec<usize>> {
    serde_json::from_str(s).map_err(|e| Error::InvalidParameter(format!("cluster '{s}': {e}")))
}

pub fn cluster_from_args(lambda1: Option<&str>, lambda2: Option<&str>) -> Result<Option<ClusterSpec>> {
    if lambda1.is_none() && lambda2.is_none() {
        return Ok(None);
    }
    let l1 = lambda1.map(parse_indices).transpose()?.unwrap_or_default();
    let l2 = lambda2.map(parse_indices).transpose()?.unwrap_or_default();
    Ok(Some(ClusterSpec::new(l1, l2)))
}
