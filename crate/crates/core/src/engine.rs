//! Precomputed state shared by the command line and the HTTP service: the
//! GW table, the one-parameter family matrices for every admissible `α`,
//! and their exact characteristic polynomials and discriminants. Requests
//! only specialize numerically.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::dubrovin::{dubrovin_matrix, BulkPoint, DubrovinError, DubrovinMatrix};
use crate::eigen::{self, match_frames, EigenError, EigenOptions};
use crate::gw::{build_potential, solve_wdvv, GWTable, Potential, WdvvError};
use crate::schubert::{YoungDiagram22, BASIS, BULK_CYCLES, DIM};
use crate::series::NUM_VARS;
use crate::spectral::{char_poly, discriminant, CharPoly, DiscriminantResult, SimplicityVerdict};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error(transparent)]
    Wdvv(#[from] WdvvError),
    #[error(transparent)]
    Dubrovin(#[from] DubrovinError),
    #[error(transparent)]
    Eigen(#[from] EigenError),
    #[error("alpha = {alpha} is outside 0..={max}")]
    AlphaOutOfRange { alpha: u32, max: u32 },
    #[error("cycle {0} carries no bulk parameter (t1 is log q); use 0,0 or one of 2,0 1,1 2,1 2,2")]
    NotABulkCycle(YoungDiagram22),
    #[error("sweep path is empty")]
    EmptyPath,
    #[error("family {cycle} at alpha = {alpha} was not built by this engine")]
    NotPrecomputed { cycle: YoungDiagram22, alpha: u32 },
}

/// The empty diagram: its coordinate is the translation `t0`.
pub const REFERENCE_CYCLE: YoungDiagram22 = BASIS[0];

fn check_cycle(cycle: YoungDiagram22) -> Result<usize, EngineError> {
    let i = cycle.index();
    if i == 0 || BULK_CYCLES.contains(&i) {
        Ok(i)
    } else {
        Err(EngineError::NotABulkCycle(cycle))
    }
}

/// Exact data for the family where only `t_cycle` (and `t0`) are nonzero.
#[derive(Clone, Debug)]
pub struct Family {
    pub cycle: YoungDiagram22,
    pub alpha: u32,
    /// Matrix with `t_cycle` and `t0` symbolic.
    pub matrix: DubrovinMatrix,
    /// Matrix with `t0 = 0`.
    pub reduced: DubrovinMatrix,
    pub char_poly: CharPoly,
    pub reduced_char_poly: CharPoly,
    pub discriminant: DiscriminantResult,
    pub verdict: SimplicityVerdict,
}

impl Family {
    fn build(cycle: usize, alpha: u32, potential: &Potential) -> Result<Self, EngineError> {
        let point = BulkPoint::family(cycle).with(0, None);
        let matrix = dubrovin_matrix(&point, potential, Some(alpha))?;
        let reduced_point = if cycle == 0 {
            BulkPoint::origin()
        } else {
            BulkPoint::family(cycle)
        };
        let reduced = dubrovin_matrix(&reduced_point, potential, Some(alpha))?;
        let reduced_char_poly = char_poly(&reduced);
        let disc = discriminant(&reduced_char_poly);
        Ok(Self {
            cycle: BASIS[cycle],
            alpha,
            char_poly: char_poly(&matrix),
            matrix,
            reduced,
            reduced_char_poly,
            verdict: SimplicityVerdict::from_discriminant(disc.clone(), alpha),
            discriminant: disc,
        })
    }

    fn point(&self, t: Complex64, t0: Complex64) -> [Complex64; NUM_VARS] {
        let mut v = [Complex64::new(0.0, 0.0); NUM_VARS];
        let i = self.cycle.index();
        v[0] = t0;
        v[i] += t;
        v
    }
}

/// One numeric spectrum. JSON field order is part of the interface.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSample {
    pub cycle: YoungDiagram22,
    pub t: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t0: Option<[f64; 2]>,
    pub q: [f64; 2],
    pub alpha: u32,
    pub eigenvalues: Vec<[f64; 2]>,
    pub residual: f64,
}

impl SpectrumSample {
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        self.eigenvalues.iter().map(|z| Complex64::new(z[0], z[1])).collect()
    }
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

/// Eigenvalues and residual of a matrix specialized at `t`, `q`.
#[derive(Clone, Debug, PartialEq)]
pub struct NumericSpectrum {
    pub eigenvalues: Vec<Complex64>,
    pub residual: f64,
}

pub fn numeric_spectrum(
    m: &DubrovinMatrix,
    t: &[Complex64; NUM_VARS],
    q: Complex64,
    opts: &EigenOptions,
) -> Result<NumericSpectrum, EigenError> {
    let a = eigen::to_matrix(DIM, &m.matrix.evaluate(t, q));
    let eigenvalues = eigen::matrix_eigenvalues(&a, opts)?;
    let residual = eigen::eigen_residual(&a, &eigenvalues);
    Ok(NumericSpectrum { eigenvalues, residual })
}

/// Roots of the exact characteristic polynomial specialized at `t`, `q`.
pub fn char_poly_roots(
    p: &CharPoly,
    t: &[Complex64; NUM_VARS],
    q: Complex64,
    opts: &EigenOptions,
) -> Result<Vec<Complex64>, EigenError> {
    eigen::polynomial_roots(&p.evaluate_coeffs(t, q), opts)
}

/// A sweep: the reference sample, then one sample per path point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub samples: Vec<SpectrumSample>,
    /// `tracks[k][f]`: index into `samples[f + 1].eigenvalues` of trail `k`,
    /// by greedy nearest-neighbor matching between consecutive path frames.
    pub tracks: Vec<Vec<usize>>,
}

#[derive(Clone, Debug)]
pub struct Engine {
    table: GWTable,
    potential: Potential,
    families: BTreeMap<(usize, u32), Family>,
    options: EigenOptions,
}

impl Engine {
    /// Solve WDVV to `max_degree` and precompute every family for
    /// `α ≤ max_degree + 1`.
    pub fn new(max_degree: u32) -> Result<Self, EngineError> {
        let table = solve_wdvv(max_degree)?;
        let potential = build_potential(&table);
        let keys: Vec<(usize, u32)> = std::iter::once(0)
            .chain(BULK_CYCLES)
            .flat_map(|c| (0..=max_degree + 1).map(move |a| (c, a)))
            .collect();
        let built: Result<Vec<Family>, EngineError> =
            keys.par_iter().map(|&(c, a)| Family::build(c, a, &potential)).collect();
        let families = keys.into_iter().zip(built?).collect();
        Ok(Self {
            table,
            potential,
            families,
            options: EigenOptions::default(),
        })
    }

    /// Like [`Engine::new`] but builds only the listed families, plus the
    /// reference family at each listed energy. For one-shot queries.
    pub fn with_families(max_degree: u32, requests: &[(YoungDiagram22, u32)]) -> Result<Self, EngineError> {
        let max_alpha = max_degree + 1;
        let mut keys = Vec::new();
        for &(cycle, alpha) in requests {
            let c = check_cycle(cycle)?;
            if alpha > max_alpha {
                return Err(EngineError::AlphaOutOfRange { alpha, max: max_alpha });
            }
            keys.extend([(c, alpha), (0, alpha)]);
        }
        keys.sort();
        keys.dedup();
        let table = solve_wdvv(max_degree)?;
        let potential = build_potential(&table);
        let built: Result<Vec<Family>, EngineError> =
            keys.par_iter().map(|&(c, a)| Family::build(c, a, &potential)).collect();
        let families = keys.into_iter().zip(built?).collect();
        Ok(Self {
            table,
            potential,
            families,
            options: EigenOptions::default(),
        })
    }

    pub fn table(&self) -> &GWTable {
        &self.table
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    pub fn max_alpha(&self) -> u32 {
        self.table.max_degree() + 1
    }

    pub fn options(&self) -> &EigenOptions {
        &self.options
    }

    pub fn family(&self, cycle: YoungDiagram22, alpha: u32) -> Result<&Family, EngineError> {
        let c = check_cycle(cycle)?;
        if alpha > self.max_alpha() {
            return Err(EngineError::AlphaOutOfRange {
                alpha,
                max: self.max_alpha(),
            });
        }
        self.families
            .get(&(c, alpha))
            .ok_or(EngineError::NotPrecomputed { cycle, alpha })
    }

    pub fn spectrum(
        &self,
        cycle: YoungDiagram22,
        t: Complex64,
        t0: Option<Complex64>,
        q: Complex64,
        alpha: u32,
    ) -> Result<SpectrumSample, EngineError> {
        let fam = self.family(cycle, alpha)?;
        let point = fam.point(t, t0.unwrap_or_default());
        let s = numeric_spectrum(&fam.matrix, &point, q, &self.options)?;
        Ok(SpectrumSample {
            cycle,
            t: pair(t),
            t0: t0.map(pair),
            q: pair(q),
            alpha,
            eigenvalues: s.eigenvalues.into_iter().map(pair).collect(),
            residual: s.residual,
        })
    }

    /// Roots of the family's exact characteristic polynomial at the same
    /// point, for cross-checking [`Engine::spectrum`].
    pub fn poly_roots(
        &self,
        cycle: YoungDiagram22,
        t: Complex64,
        t0: Option<Complex64>,
        q: Complex64,
        alpha: u32,
    ) -> Result<Vec<Complex64>, EngineError> {
        let fam = self.family(cycle, alpha)?;
        let point = fam.point(t, t0.unwrap_or_default());
        Ok(char_poly_roots(&fam.char_poly, &point, q, &self.options)?)
    }

    pub fn reference(&self, q: Complex64, alpha: u32) -> Result<SpectrumSample, EngineError> {
        self.spectrum(REFERENCE_CYCLE, Complex64::new(0.0, 0.0), None, q, alpha)
    }

    pub fn sweep(
        &self,
        cycle: YoungDiagram22,
        path: &[Complex64],
        q: Complex64,
        alpha: u32,
    ) -> Result<Sweep, EngineError> {
        if path.is_empty() {
            return Err(EngineError::EmptyPath);
        }
        self.family(cycle, alpha)?;
        let reference = self.reference(q, alpha)?;
        let frames: Result<Vec<SpectrumSample>, EngineError> = path
            .par_iter()
            .map(|&t| self.spectrum(cycle, t, None, q, alpha))
            .collect();
        let frames = frames?;
        let mut tracks: Vec<Vec<usize>> = (0..DIM).map(|k| vec![k]).collect();
        for w in frames.windows(2) {
            let perm = match_frames(&w[0].eigenvalues(), &w[1].eigenvalues());
            for tr in &mut tracks {
                let last = *tr.last().unwrap();
                tr.push(perm[last]);
            }
        }
        let mut samples = vec![reference];
        samples.extend(frames);
        Ok(Sweep { samples, tracks })
    }

    /// Basis, cycles and defaults for clients.
    pub fn meta(&self) -> serde_json::Value {
        json!({
            "basis": BASIS.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
            "bulk_cycles": BULK_CYCLES.iter().map(|&i| BASIS[i].to_string()).collect::<Vec<_>>(),
            "reference_cycle": REFERENCE_CYCLE.to_string(),
            "dubrovin_class": "4σ(1,0) + t0σ(0,0) - t2σ(2,0) - t3σ(1,1) - 2t4σ(2,1) - 3t5σ(2,2)",
            "max_degree": self.table.max_degree(),
            "alpha": {"default": 2, "min": 0, "max": self.max_alpha()},
            "q_default": [1.0, 0.0],
            "residual_bound": self.options.residual_bound,
        })
    }
}

/// A complex number written `a`, `a+bi`, `a-bi`, `bi`, `i` or `re:im`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexArg(pub Complex64);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse {0:?} as a complex number (use a+bi or re:im)")]
pub struct ParseComplexError(pub String);

impl FromStr for ComplexArg {
    type Err = ParseComplexError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseComplexError(s.to_string());
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t.is_empty() {
            return Err(err());
        }
        let finite = |v: f64| if v.is_finite() { Ok(v) } else { Err(err()) };
        if let Some((re, im)) = t.split_once(':') {
            let re = finite(re.parse().map_err(|_| err())?)?;
            let im = finite(im.parse().map_err(|_| err())?)?;
            return Ok(Self(Complex64::new(re, im)));
        }
        let Some(body) = t.strip_suffix('i') else {
            return Ok(Self(Complex64::new(finite(t.parse().map_err(|_| err())?)?, 0.0)));
        };
        // split at the last sign that is not an exponent sign
        let bytes = body.as_bytes();
        let split = (1..bytes.len())
            .rev()
            .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
        let (re, im) = match split {
            Some(k) => (&body[..k], &body[k..]),
            None => ("0", body),
        };
        let im = match im {
            "" | "+" => 1.0,
            "-" => -1.0,
            x => x.parse().map_err(|_| err())?,
        };
        let re: f64 = re.parse().map_err(|_| err())?;
        Ok(Self(Complex64::new(finite(re)?, finite(im)?)))
    }
}

impl fmt::Display for ComplexArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.0.re, self.0.im)
    }
}

/// Comma-separated complex values, e.g. `0.5+1i,1+2i` or `0.5:1,1:2`.
pub fn parse_path(s: &str) -> Result<Vec<Complex64>, ParseComplexError> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| p.parse::<ComplexArg>().map(|c| c.0))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn complex_syntax() {
        let p = |s: &str| s.parse::<ComplexArg>().map(|c| c.0);
        assert_eq!(p("1+2i"), Ok(c(1.0, 2.0)));
        assert_eq!(p("0.5-i"), Ok(c(0.5, -1.0)));
        assert_eq!(p("-3i"), Ok(c(0.0, -3.0)));
        assert_eq!(p("i"), Ok(c(0.0, 1.0)));
        assert_eq!(p("2"), Ok(c(2.0, 0.0)));
        assert_eq!(p("1e-3+2e+1i"), Ok(c(1e-3, 20.0)));
        assert_eq!(p("1.5:-3"), Ok(c(1.5, -3.0)));
        assert!(p("abc").is_err());
        assert!(p("nan").is_err());
        assert_eq!(parse_path("0.5+1i,1+2i, 1.5:3").unwrap().len(), 3);
    }

    #[test]
    fn engine_reference_and_errors() {
        let e = Engine::new(1).unwrap();
        let r = e.reference(c(1.0, 0.0), 2).unwrap();
        assert_eq!(r.cycle.to_string(), "0,0");
        assert_eq!(r.eigenvalues.len(), 6);
        assert!(matches!(e.family(BASIS[1], 2), Err(EngineError::NotABulkCycle(_))));
        assert!(matches!(e.family(BASIS[2], 3), Err(EngineError::AlphaOutOfRange { .. })));
        assert!(matches!(e.sweep(BASIS[2], &[], c(1.0, 0.0), 2), Err(EngineError::EmptyPath)));
    }

    #[test]
    fn sweep_layout() {
        let e = Engine::new(1).unwrap();
        let path = [c(0.5, 1.0), c(1.0, 2.0), c(1.5, 3.0)];
        let s = e.sweep(BASIS[3], &path, c(1.0, 0.0), 2).unwrap();
        assert_eq!(s.samples.len(), 4);
        assert_eq!(s.samples[0].cycle, REFERENCE_CYCLE);
        assert_eq!(s.tracks.len(), DIM);
        assert!(s.tracks.iter().all(|t| t.len() == 3));
        let json = serde_json::to_string(&s.samples[1]).unwrap();
        assert!(json.starts_with("{\"cycle\":\"1,1\",\"t\":[0.5,1.0],\"q\":[1.0,0.0],\"alpha\":2,\"eigenvalues\":"));
    }
}
