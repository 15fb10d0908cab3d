//! Built-in potentials.

use crate::potential::Potential;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExampleSpec {
    pub name: &'static str,
    /// Potential text for `y'' + y = eps V`.
    pub dsl: &'static str,
    pub params: &'static [&'static str],
    /// Order used when none is given.
    pub cap: usize,
    pub summary: &'static str,
}

impl ExampleSpec {
    pub fn potential(&self) -> Potential {
        Potential::parse(self.dsl, self.params).expect("built-in potentials parse")
    }
}

pub const EXAMPLES: [ExampleSpec; 5] = [
    ExampleSpec {
        name: "vdp",
        dsl: "(1 - y^2)*y'",
        params: &[],
        cap: 3,
        summary: "Van der Pol",
    },
    ExampleSpec {
        name: "mathieu",
        dsl: "(g + 2*cos(1t))*(-y)",
        params: &["g"],
        cap: 3,
        summary: "Mathieu near a = 1 with detuning g",
    },
    ExampleSpec {
        name: "duffing",
        dsl: "-(y' + g*y^3)",
        params: &["g"],
        cap: 3,
        summary: "damped Duffing",
    },
    ExampleSpec {
        name: "rayleigh",
        dsl: "y'*(1 - (1/3)*y'^2)",
        params: &[],
        cap: 3,
        summary: "Rayleigh",
    },
    ExampleSpec {
        name: "nonauto",
        dsl: "2*y*y'*cos(1t)",
        params: &[],
        cap: 3,
        summary: "parametrically driven, nonlinear and nonautonomous",
    },
];

pub fn example(name: &str) -> Option<&'static ExampleSpec> {
    EXAMPLES.iter().find(|e| e.name == name)
}
