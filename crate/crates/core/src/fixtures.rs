//! Named test systems shared across modules.

use crate::scalar::Scalar;
use crate::system::FiniteSystem;

fn build<T: Scalar>(measure: &[f64], map: &[usize]) -> FiniteSystem<T> {
    FiniteSystem::from_parts(measure.iter().map(|&m| T::lit(m)).collect(), map.to_vec())
        .expect("fixture is well formed")
}

/// SYS-CYCLE3: the 3-cycle `0 → 1 → 2 → 0` with unit masses.
pub fn cycle3<T: Scalar>() -> FiniteSystem<T> {
    build(&[1.0, 1.0, 1.0], &[1, 2, 0])
}

/// SYS-TAIL: fixed point `0` with the tail `2 → 1 → 0`.
pub fn tail<T: Scalar>() -> FiniteSystem<T> {
    build(&[1.0, 1.0, 1.0], &[0, 0, 1])
}

/// SYS-TWOCYC: two disjoint 2-cycles `(0 1)` and `(2 3)`.
pub fn twocyc<T: Scalar>() -> FiniteSystem<T> {
    build(&[1.0, 1.0, 1.0, 1.0], &[1, 0, 3, 2])
}

/// SYS-NULL: identity on two atoms, atom 1 is null.
pub fn null<T: Scalar>() -> FiniteSystem<T> {
    build(&[1.0, 0.0], &[0, 1])
}

/// All fixtures with their names.
pub fn all<T: Scalar>() -> Vec<(&'static str, FiniteSystem<T>)> {
    vec![
        ("cycle3", cycle3()),
        ("tail", tail()),
        ("twocyc", twocyc()),
        ("null", null()),
    ]
}

pub fn by_name<T: Scalar>(name: &str) -> Option<FiniteSystem<T>> {
    all().into_iter().find(|(n, _)| *n == name).map(|(_, s)| s)
}
