use std::fmt;
use std::sync::Arc;

/// Independent variables `t, x, y` and the dependent variable `u`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BaseVar {
    T,
    X,
    Y,
    U,
}

impl BaseVar {
    pub const INDEPENDENT: [BaseVar; 3] = [BaseVar::T, BaseVar::X, BaseVar::Y];
    pub const ALL: [BaseVar; 4] = [BaseVar::T, BaseVar::X, BaseVar::Y, BaseVar::U];

    pub fn name(self) -> &'static str {
        match self {
            BaseVar::T => "t",
            BaseVar::X => "x",
            BaseVar::Y => "y",
            BaseVar::U => "u",
        }
    }

    pub fn from_name(s: &str) -> Option<BaseVar> {
        match s {
            "t" => Some(BaseVar::T),
            "x" => Some(BaseVar::X),
            "y" => Some(BaseVar::Y),
            "u" => Some(BaseVar::U),
            _ => None,
        }
    }

    fn letter(self) -> char {
        self.name().chars().next().unwrap()
    }
}

/// Multi-index of a jet coordinate `u_J`: how many times `u` is differentiated
/// with respect to each of `t, x, y`. `u_xy` and `u_yx` share one index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct JetIndex {
    pub t: u8,
    pub x: u8,
    pub y: u8,
}

impl JetIndex {
    pub const MAX_ORDER: u8 = 3;

    pub fn new(t: u8, x: u8, y: u8) -> JetIndex {
        JetIndex { t, x, y }
    }

    pub fn order(self) -> u8 {
        self.t + self.x + self.y
    }

    pub fn count(self, v: BaseVar) -> u8 {
        match v {
            BaseVar::T => self.t,
            BaseVar::X => self.x,
            BaseVar::Y => self.y,
            BaseVar::U => 0,
        }
    }

    /// The index of `D_v u_J`. `v` must be an independent variable.
    pub fn bump(self, v: BaseVar) -> JetIndex {
        let mut j = self;
        match v {
            BaseVar::T => j.t += 1,
            BaseVar::X => j.x += 1,
            BaseVar::Y => j.y += 1,
            BaseVar::U => panic!("u is not an independent variable"),
        }
        j
    }

    /// Parses the suffix of `u_<letters>`; letters may come in any order.
    pub fn from_letters(s: &str) -> Option<JetIndex> {
        if s.is_empty() || s.len() > JetIndex::MAX_ORDER as usize {
            return None;
        }
        let mut j = JetIndex::default();
        for c in s.chars() {
            match c {
                't' => j.t += 1,
                'x' => j.x += 1,
                'y' => j.y += 1,
                _ => return None,
            }
        }
        Some(j)
    }

    pub fn letters(self) -> String {
        let mut s = String::new();
        for v in BaseVar::INDEPENDENT {
            for _ in 0..self.count(v) {
                s.push(v.letter());
            }
        }
        s
    }

    /// All indices of order `1..=max`, ordered by order then lexicographically.
    pub fn all_up_to(max: u8) -> Vec<JetIndex> {
        let mut out = Vec::new();
        for ord in 1..=max {
            for t in (0..=ord).rev() {
                for x in (0..=ord - t).rev() {
                    out.push(JetIndex::new(t, x, ord - t - x));
                }
            }
        }
        out
    }
}

/// A scalar name that can appear in an expression.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    Param(Arc<str>),
    Base(BaseVar),
    Jet(JetIndex),
}

impl Symbol {
    pub fn param(name: &str) -> Symbol {
        Symbol::Param(Arc::from(name))
    }

    pub fn jet(t: u8, x: u8, y: u8) -> Symbol {
        Symbol::Jet(JetIndex::new(t, x, y))
    }

    /// Resolves `t`, `x`, `y`, `u` and jet names such as `u_xy`; anything else is
    /// not a variable.
    pub fn variable_from_name(name: &str) -> Option<Symbol> {
        if let Some(b) = BaseVar::from_name(name) {
            return Some(Symbol::Base(b));
        }
        name.strip_prefix("u_")
            .and_then(JetIndex::from_letters)
            .map(Symbol::Jet)
    }

    pub fn is_param(&self) -> bool {
        matches!(self, Symbol::Param(_))
    }

    pub fn is_jet(&self) -> bool {
        matches!(self, Symbol::Jet(_))
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Param(p) => f.write_str(p),
            Symbol::Base(b) => f.write_str(b.name()),
            Symbol::Jet(j) => write!(f, "u_{}", j.letters()),
        }
    }
}

impl From<BaseVar> for Symbol {
    fn from(b: BaseVar) -> Symbol {
        Symbol::Base(b)
    }
}

impl From<JetIndex> for Symbol {
    fn from(j: JetIndex) -> Symbol {
        Symbol::Jet(j)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jet_names_are_symmetric() {
        assert_eq!(
            Symbol::variable_from_name("u_yx"),
            Symbol::variable_from_name("u_xy")
        );
        assert_eq!(Symbol::jet(1, 0, 2).to_string(), "u_tyy");
        assert_eq!(Symbol::variable_from_name("u_"), None);
        assert_eq!(Symbol::variable_from_name("u_z"), None);
    }

    #[test]
    fn enumerates_jets() {
        let j = JetIndex::all_up_to(2);
        assert_eq!(j.len(), 9);
        assert_eq!(j[0], JetIndex::new(1, 0, 0));
        assert_eq!(JetIndex::all_up_to(3).len(), 19);
    }
}
