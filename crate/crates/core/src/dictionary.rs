//! The eight worked images of paths under single moves. Each entry names a
//! source model, a move and a path before and after; the move's braid
//! must carry the first path onto the second.

use std::fmt;

use thiserror::Error;

use crate::braid::BraidError;
use crate::moves::{realize_move, Model, MoveError, MoveKind};
use crate::notation::{parse, to_band, LabelMap, NotationError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DictionaryError {
    #[error(transparent)]
    Move(#[from] MoveError),
    #[error(transparent)]
    Notation(#[from] NotationError),
    #[error(transparent)]
    Braid(#[from] BraidError),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DictCase {
    pub source: Model,
    pub mv: MoveKind,
    pub before: String,
    pub after: String,
}

impl DictCase {
    /// Whether the realized move carries `before` onto `after`.
    pub fn holds(&self) -> Result<bool, DictionaryError> {
        let (w, target) = realize_move(&self.mv, &self.source)?;
        let ls = LabelMap::for_model(self.source.real_count(), self.source.pairs);
        let lt = LabelMap::for_model(target.real_count(), target.pairs);
        let (b, _) = to_band(&parse(&self.before, &ls)?, &ls)?;
        let (c, _) = to_band(&parse(&self.after, &lt)?, &lt)?;
        Ok(b.transported(&w).same_path(&c)?)
    }
}

impl fmt::Display for DictCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} on {}: {} -> {}", self.mv, self.source.name(), self.before, self.after)
    }
}

/// All eight entries on `n` points with parameter `k` (needs `3 ≤ k` and
/// room for the widest model).
pub fn entries(n: usize, k: usize) -> Result<Vec<DictCase>, DictionaryError> {
    let model = |pairs| Model::new(n, pairs);
    let case = |source, mv, before: String, after: String| DictCase { source, mv, before, after };
    Ok(vec![
        case(model(0)?, MoveKind::BlockTwist { k, l: k + 1, r: 1 }, format!("~z[1,{k}]"), format!("~z({k})[1,{}]", k + 1)),
        case(model(2)?, MoveKind::I4toI2(k), format!("_z[1,{}]", k + 1), format!("_z({})[1,{}]", k + 1, k + 3)),
        case(
            model(2)?,
            MoveKind::I4toI2Prime(k),
            format!("z({})[{},{}]", k + 1, k - 1, k + 2),
            format!("~z({})({})[{},{}]", k, k + 2, k - 1, k + 4),
        ),
        case(
            model(1)?,
            MoveKind::I2toI4(k),
            format!("z[{},{}] ^ Z2[{},{}]", k + 2, k + 3, k + 1, k + 2),
            format!("z[{},{}] ^ ~Z-2[{},{}]", k, k + 1, k + 1, n - 3),
        ),
        case(model(0)?, MoveKind::RtoI2(k), format!("z({k})[{},{}]", k - 1, k + 2), format!("z[{},{k}]", k - 1)),
        case(model(1)?, MoveKind::I2toR(k), format!("z[{},{k}]", k - 1), format!("_z({})[{},{}]", k + 1, k - 1, k + 2)),
        case(model(3)?, MoveKind::I6toI4(k), format!("z[{},{k}]", k - 1), format!("_z({})[{},{}]", k + 1, k - 1, k + 2)),
        case(
            model(2)?,
            MoveKind::I4toI6(k),
            format!("z[{},{}]", k + 1, k + 2),
            format!("~z({})({})[{k},{}]", n - 5, n - 4, n - 3),
        ),
    ])
}
