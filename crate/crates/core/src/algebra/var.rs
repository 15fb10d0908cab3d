use std::collections::BTreeSet;
use std::fmt;
use std::sync::{Mutex, OnceLock};

/// Ring variables.
///
/// The derived ordering is the variable precedence used by the canonical
/// term order: `t < s < A < B < Ar < Br < R < u < ph < E < eps < y < y' <
/// parameters`. Parameters compare by name.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Var {
    /// Time.
    T,
    /// Shifted initial time used by the functional-relation check.
    S,
    /// Bare amplitude of `e^{it}`.
    A,
    /// Bare amplitude of `e^{-it}`.
    B,
    /// Renormalized amplitude of `e^{it}`.
    Ar,
    /// Renormalized amplitude of `e^{-it}`.
    Br,
    /// Polar radius.
    R,
    /// Generic unknown for root solving (e.g. `R^2`).
    U,
    /// The phase exponential `e^{i theta}` (Laurent).
    Phase,
    /// The harmonic `e^{it}` (Laurent).
    E,
    /// The expansion parameter, only used transiently by parsers.
    Eps,
    /// The unknown `y` inside a potential.
    Y,
    /// The derivative `y'` inside a potential.
    Yp,
    /// A declared symbolic parameter.
    Param(ParamName),
}

/// Interned parameter name. Comparison is by string content.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParamName(&'static str);

impl ParamName {
    pub fn as_str(&self) -> &'static str {
        self.0
    }
}

impl fmt::Debug for ParamName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn interner() -> &'static Mutex<BTreeSet<&'static str>> {
    static NAMES: OnceLock<Mutex<BTreeSet<&'static str>>> = OnceLock::new();
    NAMES.get_or_init(|| Mutex::new(BTreeSet::new()))
}

impl Var {
    /// Parameter variable with the given name (interned).
    pub fn param(name: &str) -> Var {
        let mut names = interner().lock().expect("parameter interner poisoned");
        if let Some(existing) = names.get(name) {
            return Var::Param(ParamName(existing));
        }
        let leaked: &'static str = Box::leak(name.to_owned().into_boxed_str());
        names.insert(leaked);
        Var::Param(ParamName(leaked))
    }

    pub fn name(&self) -> &'static str {
        match self {
            Var::T => "t",
            Var::S => "s",
            Var::A => "A",
            Var::B => "B",
            Var::Ar => "Ar",
            Var::Br => "Br",
            Var::R => "R",
            Var::U => "u",
            Var::Phase => "ph",
            Var::E => "E",
            Var::Eps => "eps",
            Var::Y => "y",
            Var::Yp => "y'",
            Var::Param(p) => p.as_str(),
        }
    }

    /// Resolve a reserved variable name. Anything else is a parameter.
    pub fn from_name(name: &str) -> Var {
        match name {
            "t" => Var::T,
            "s" => Var::S,
            "A" => Var::A,
            "B" => Var::B,
            "Ar" => Var::Ar,
            "Br" => Var::Br,
            "R" => Var::R,
            "u" => Var::U,
            "ph" => Var::Phase,
            "E" => Var::E,
            "eps" => Var::Eps,
            "y" => Var::Y,
            "y'" => Var::Yp,
            other => Var::param(other),
        }
    }

    pub fn is_param(&self) -> bool {
        matches!(self, Var::Param(_))
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_are_interned_and_ordered_by_name() {
        let g2 = Var::param("g2");
        let g1 = Var::param("g1");
        assert_eq!(g1, Var::param("g1"));
        assert!(g1 < g2);
        assert!(Var::T < Var::A && Var::R < g1);
    }

    #[test]
    fn names_round_trip() {
        for v in [Var::T, Var::S, Var::A, Var::Br, Var::Phase, Var::E, Var::Yp, Var::param("g")] {
            assert_eq!(Var::from_name(v.name()), v);
        }
    }
}
