use std::fmt;

use super::category::{Category, Dir};

/// The six combinatory rules, in ranking order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleId {
    /// `X/Y  Y  =>  X`
    Fa,
    /// `Y  X\Y  =>  X`
    Ba,
    /// `X/Y  Y/Z  =>  X/Z`
    Fc,
    /// `Y\Z  X\Y  =>  X\Z`
    Bc,
    /// `X/Y  Y\Z  =>  X\Z`
    FcX,
    /// `Y/Z  X\Y  =>  X/Z`
    BcX,
}

impl RuleId {
    pub const ALL: [RuleId; 6] = [RuleId::Fa, RuleId::Ba, RuleId::Fc, RuleId::Bc, RuleId::FcX, RuleId::BcX];

    pub fn symbol(self) -> &'static str {
        match self {
            RuleId::Fa => ">",
            RuleId::Ba => "<",
            RuleId::Fc => ">B",
            RuleId::Bc => "<B",
            RuleId::FcX => ">Bx",
            RuleId::BcX => "<Bx",
        }
    }

    /// Ranking penalty: application is free, composition costs, crossing more.
    pub fn cost(self) -> u32 {
        match self {
            RuleId::Fa | RuleId::Ba => 0,
            RuleId::Fc | RuleId::Bc => 1,
            RuleId::FcX | RuleId::BcX => 2,
        }
    }

    pub fn is_application(self) -> bool {
        matches!(self, RuleId::Fa | RuleId::Ba)
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

pub fn apply_rule(rule: RuleId, left: &Category, right: &Category) -> Option<Category> {
    use Dir::{Backward as B, Forward as F};
    match rule {
        RuleId::Fa => {
            let (x, y) = left.as_slash(F)?;
            y.unify(right)?;
            Some(x.clone())
        }
        RuleId::Ba => {
            let (x, y) = right.as_slash(B)?;
            y.unify(left)?;
            Some(x.clone())
        }
        RuleId::Fc => {
            let (x, y) = left.as_slash(F)?;
            let (y2, z) = right.as_slash(F)?;
            y.unify(y2)?;
            Some(Category::fwd(x.clone(), z.clone()))
        }
        RuleId::Bc => {
            let (y2, z) = left.as_slash(B)?;
            let (x, y) = right.as_slash(B)?;
            y.unify(y2)?;
            Some(Category::bwd(x.clone(), z.clone()))
        }
        RuleId::FcX => {
            let (x, y) = left.as_slash(F)?;
            let (y2, z) = right.as_slash(B)?;
            y.unify(y2)?;
            Some(Category::bwd(x.clone(), z.clone()))
        }
        RuleId::BcX => {
            let (y2, z) = left.as_slash(F)?;
            let (x, y) = right.as_slash(B)?;
            y.unify(y2)?;
            Some(Category::fwd(x.clone(), z.clone()))
        }
    }
}
