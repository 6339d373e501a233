//! Built-in table-level algebras: the two-context gluings `b1`, `b2`, the
//! six-element `b2'`, and plain powerset algebras.

use crate::algebra::PartialBooleanAlgebra;
use crate::builder::Amalgam;

/// Powerset algebra on the given atom labels (one maximal context).
pub fn boolean_algebra(atoms: &[&str]) -> PartialBooleanAlgebra {
    Amalgam {
        contexts: vec![atoms.iter().map(|s| s.to_string()).collect()],
        identifications: vec![],
        overrides: vec![],
    }
    .assemble()
    .expect("powerset assembly cannot fail")
}

/// Twelve elements, two 8-element contexts glued on `{0, 1, c, ~c}`, with `c`
/// an atom of both contexts. Exclusive and transitive.
pub fn algebra_b1() -> PartialBooleanAlgebra {
    Amalgam {
        contexts: vec![
            vec!["a1".into(), "b1".into(), "c".into()],
            vec!["a2".into(), "b2".into(), "c".into()],
        ],
        identifications: vec![((0, 0b100), (1, 0b100))],
        overrides: vec![],
    }
    .assemble()
    .expect("b1 assembly cannot fail")
}

/// Same twelve elements glued differently: `c` is the join `a1 ∨ b1` in the
/// first context but an atom of the second. Breaks exclusivity and
/// transitivity.
pub fn algebra_b2() -> PartialBooleanAlgebra {
    Amalgam {
        contexts: vec![
            vec!["a1".into(), "b1".into(), "~c".into()],
            vec!["a2".into(), "b2".into(), "c".into()],
        ],
        identifications: vec![((0, 0b011), (1, 0b100))],
        overrides: vec![],
    }
    .assemble()
    .expect("b2 assembly cannot fail")
}

/// `{0, a1, b1, a2, b2, 1}`: two 4-element contexts sharing only the bounds.
/// The exclusive algebra with the same atom graph as `b2`.
pub fn algebra_b2_prime() -> PartialBooleanAlgebra {
    Amalgam {
        contexts: vec![
            vec!["a1".into(), "b1".into()],
            vec!["a2".into(), "b2".into()],
        ],
        identifications: vec![],
        overrides: vec![],
    }
    .assemble()
    .expect("b2' assembly cannot fail")
}
