//! Named benchmark problems.

use crate::CliError;
use fraclap::{DiffField, Domain, ScalarField};
use std::f64::consts::PI;

/// Whether boundary data is known on the whole exterior (Riesz-type solvers
/// need this) or only on the boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataSupport {
    Exterior,
    BoundaryOnly,
}

#[derive(Clone)]
pub struct Case {
    pub name: String,
    pub description: String,
    pub domain: Domain,
    pub f: ScalarField,
    pub g: ScalarField,
    /// A smooth extension of `g` with its gradient, for nonharmonic lifting.
    pub lift: Option<DiffField>,
    pub data: DataSupport,
    /// Used when the run does not set `alpha`.
    pub default_alpha: f64,
    /// Admissible orders, an open interval.
    pub alpha_range: (f64, f64),
    /// Whether `alpha = 2`, the classical Poisson problem, is also accepted.
    pub allows_classical: bool,
    /// Closed-form solution, when one is known for some order.
    pub exact: Option<fn(f64, [f64; 2]) -> Option<f64>>,
}

impl std::fmt::Debug for Case {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Case").field("name", &self.name).field("domain", &self.domain.name()).finish()
    }
}

impl Case {
    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn zero_data(&self) -> bool {
        self.g.is_known_zero()
    }

    pub fn check_alpha(&self, alpha: f64) -> Result<(), CliError> {
        let (lo, hi) = self.alpha_range;
        if (alpha > lo && alpha < hi) || (self.allows_classical && alpha == 2.0) {
            Ok(())
        } else {
            Err(CliError::Config(format!("alpha = {alpha} is outside ({lo}, {hi}) for case {}", self.name)))
        }
    }
}

#[derive(Debug, Clone)]
pub struct CaseRegistry {
    cases: Vec<Case>,
}

fn sin_pi(x: f64) -> f64 {
    fraclap::special::sin_pi(x)
}

fn zero_bc(name: String, description: String, domain: Domain, f: ScalarField, alpha: f64) -> Case {
    Case {
        name,
        description,
        domain,
        f,
        g: ScalarField::zero(),
        lift: None,
        data: DataSupport::Exterior,
        default_alpha: alpha,
        alpha_range: (0.0, 2.0),
        allows_classical: false,
        exact: None,
    }
}

fn case_i_exact(alpha: f64, x: [f64; 2]) -> Option<f64> {
    (alpha == 2.0).then(|| x[0].powi(3) / 6.0 + 5.0 * x[0] / 6.0)
}

fn case_ii_exact(alpha: f64, x: [f64; 2]) -> Option<f64> {
    (alpha == 2.0).then(|| -x[0].powi(3) / 6.0 + 7.0 * x[0] / 6.0)
}

fn sine_1d_exact(alpha: f64, x: [f64; 2]) -> Option<f64> {
    Some(PI.powf(-alpha) * sin_pi(x[0]))
}

impl CaseRegistry {
    /// All benchmark cases.
    pub fn standard() -> Self {
        let mut cases = Vec::new();
        for l in [1.0, 2.0, 5.0] {
            let dom = Domain::interval(l).expect("positive half-length");
            cases.push(zero_bc(
                format!("interval-f1-L{l}"),
                format!("f = 1 on (-{l}, {l}), zero exterior data"),
                dom.clone(),
                ScalarField::interior(|_| 1.0),
                1.5,
            ));
            let mut c = zero_bc(
                format!("interval-sine-L{l}"),
                format!("f = sin(pi x) on (-{l}, {l}), zero exterior data"),
                dom,
                ScalarField::interior(|x| sin_pi(x[0])),
                1.5,
            );
            if l == 1.0 {
                // an eigenfunction of the spectral operator on (-1, 1)
                c.exact = Some(sine_1d_exact);
            }
            cases.push(c);
        }
        let unit = Domain::interval(1.0).expect("positive half-length");
        for (name, sign, exact) in [("interval-case-i", -1.0, case_i_exact as fn(f64, [f64; 2]) -> Option<f64>), ("interval-case-ii", 1.0, case_ii_exact)] {
            cases.push(Case {
                name: name.into(),
                description: format!("f = {}x on (-1, 1), u(-1) = -1, u(1) = 1", if sign < 0.0 { "-" } else { "" }),
                domain: unit.clone(),
                f: ScalarField::interior(move |x| sign * x[0]),
                g: ScalarField::from_1d(|x| x),
                lift: Some(DiffField::new(|p| p[0], |_| [1.0, 0.0])),
                data: DataSupport::BoundaryOnly,
                default_alpha: 1.5,
                alpha_range: (0.0, 2.0),
                allows_classical: true,
                exact: Some(exact),
            });
        }
        let square = Domain::rectangle(1.0, 1.0).expect("positive sides");
        let disk = Domain::disk(1.0).expect("positive radius");
        let sines = || ScalarField::interior(|x| sin_pi(x[0]) * sin_pi(x[1]));
        let radial = || ScalarField::interior(|x| sin_pi(x[0] * x[0] + x[1] * x[1]));
        let table: [(&str, Domain, &str, fn() -> ScalarField); 3] = [
            ("square", square.clone(), "sin(pi x) sin(pi y)", sines),
            ("disk", disk, "sin(pi r^2)", radial),
            ("lshape", Domain::lshape(), "sin(pi x) sin(pi y)", sines),
        ];
        for (shape, dom, fname, f34) in table {
            for (k, alpha) in [(1, 0.5), (2, 1.5), (3, 0.5), (4, 1.5)] {
                let (f, label) = if k <= 2 { (ScalarField::interior(|_| 1.0), "1") } else { (f34(), fname) };
                cases.push(zero_bc(
                    format!("{shape}-case{k}"),
                    format!("f = {label}, alpha = {alpha} on the {shape}, zero exterior data"),
                    dom.clone(),
                    f,
                    alpha,
                ));
            }
        }
        let gauss = |p: [f64; 2]| (-(p[0] * p[0] + p[1] * p[1])).exp();
        cases.push(Case {
            name: "square-inhom".into(),
            description: "f = 1 on [-1, 1]^2, u = exp(-|x|^2) on the boundary or exterior".into(),
            domain: square,
            f: ScalarField::interior(|_| 1.0),
            g: ScalarField::whole_space(gauss),
            lift: Some(DiffField::new(gauss, move |p| {
                let e = gauss(p);
                [-2.0 * p[0] * e, -2.0 * p[1] * e]
            })),
            data: DataSupport::Exterior,
            default_alpha: 1.5,
            alpha_range: (0.0, 2.0),
            allows_classical: false,
            exact: None,
        });
        CaseRegistry { cases }
    }

    pub fn get(&self, name: &str) -> Result<&Case, CliError> {
        self.cases
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| CliError::Config(format!("unknown case {name:?}; see list-cases")))
    }

    pub fn iter(&self) -> impl Iterator<Item = &Case> {
        self.cases.iter()
    }

    pub fn names(&self) -> Vec<&str> {
        self.cases.iter().map(|c| c.name.as_str()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_cases_resolve() {
        let r = CaseRegistry::standard();
        for shape in ["square", "disk", "lshape"] {
            for k in 1..=4 {
                let c = r.get(&format!("{shape}-case{k}")).unwrap();
                assert_eq!(c.default_alpha, if k % 2 == 1 { 0.5 } else { 1.5 });
                assert!(c.zero_data());
            }
        }
        for n in ["interval-case-i", "interval-case-ii", "square-inhom", "interval-f1-L5", "interval-sine-L2"] {
            assert!(r.get(n).is_ok(), "{n}");
        }
        assert!(r.get("cube").is_err());
        assert_eq!(r.names().len(), 6 + 2 + 12 + 1);
    }

    #[test]
    fn case_data() {
        let r = CaseRegistry::standard();
        let c = r.get("interval-case-i").unwrap();
        assert_eq!((c.g.eval([-1.0, 0.0]), c.g.eval([1.0, 0.0])), (-1.0, 1.0));
        assert_eq!(c.f.eval([0.5, 0.0]), -0.5);
        assert_eq!((c.exact.unwrap())(2.0, [1.0, 0.0]), Some(1.0));
        assert!(c.check_alpha(2.0).is_ok());
        let d = r.get("disk-case3").unwrap();
        assert!((d.f.eval([0.5, 0.5]) - 1.0).abs() < 1e-15);
        assert!(d.check_alpha(2.0).is_err());
        let s = r.get("square-inhom").unwrap();
        assert_eq!(s.g.eval([0.0, 0.0]), 1.0);
        assert!((s.lift.as_ref().unwrap().grad([0.5, 0.0])[0] + (-0.25f64).exp()).abs() < 1e-15);
    }
}
