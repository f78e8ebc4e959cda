//! Named initial data from the solution dictionary and the seeded test
//! battery shared by the monitors, the tables and the command line.

use std::f64::consts::SQRT_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::soliton::{ModelKind, SolitonModel};
use crate::spectral::{multi_indices, GaussianProfile, HermiteField, InitialData, ProfileFamily};

/// Coefficients of the linear row, `c = (0.5, -1.5, 1.0)` truncated to `n`.
pub fn linear_coeffs(n: usize) -> Vec<f64> {
    [0.5, -1.5, 1.0].iter().cycle().take(n).copied().collect()
}

/// `c · y` in the eigenbasis: `h_1(y) = y / sqrt 2`.
pub fn linear_field(c: &[f64]) -> Result<HermiteField> {
    let n = c.len();
    HermiteField::from_terms(
        SolitonModel::euclidean(n)?,
        1,
        c.iter().enumerate().map(|(i, ci)| {
            let mut k = vec![0; n];
            k[i] = 1;
            (k, ci * SQRT_2)
        }),
    )
}

/// `f - n/2`: `½ Σ h_2(y_i)` on `R^n` and `½ h_2(z)` on the cylinder.
pub fn quadratic_field(model: &SolitonModel) -> Result<HermiteField> {
    let n = model.dim();
    let terms: Vec<(Vec<u32>, f64)> = match model.kind() {
        ModelKind::EuclideanGaussian => (0..n)
            .map(|i| {
                let mut k = vec![0; n];
                k[i] = 2;
                (k, 0.5)
            })
            .collect(),
        ModelKind::RoundCylinder => vec![(vec![0, 2], 0.5)],
    };
    HermiteField::from_terms(model.clone(), 2, terms)
}

/// Multi-index of the eigenfunction used for the general-eigenvalue row.
pub fn mode_index(n: usize) -> Vec<u32> {
    let mut k = vec![0; n];
    if n == 1 {
        k[0] = 3;
    } else {
        k[0] = 1;
        k[1] = 2;
    }
    k
}

/// Row `row` (1 to 7) of the solution dictionary on `R^n` at `t = 0`.
/// `param` is the profile constant for rows 6 and 7 (defaults 2 and 1.5).
pub fn dictionary_row(row: u32, n: usize, param: Option<f64>) -> Result<InitialData> {
    let model = SolitonModel::euclidean(n)?;
    Ok(match row {
        1 => InitialData::Field(HermiteField::constant(model, 1.0)),
        2 => InitialData::Field(linear_field(&linear_coeffs(n))?),
        3 | 4 => InitialData::Field(quadratic_field(&model)?),
        5 => {
            let k = mode_index(n);
            InitialData::Field(HermiteField::from_terms(model, k.iter().sum(), [(k, 1.0)])?)
        }
        6 => InitialData::Profile(GaussianProfile::new(ProfileFamily::Reverse, param.unwrap_or(2.0), n)?),
        7 => InitialData::Profile(GaussianProfile::new(ProfileFamily::Forward, param.unwrap_or(1.5), n)?),
        _ => return Err(Error::Config(format!("no dictionary row {row}; rows are 1 to 7"))),
    })
}

/// Random field on `R^n` with every coefficient of total degree `<= degree`
/// drawn from `[-1, 1]`.
pub fn random_field(rng: &mut ChaCha8Rng, n: usize, degree: u32) -> Result<HermiteField> {
    let terms: Vec<(Vec<u32>, f64)> = multi_indices(n, degree)
        .into_iter()
        .map(|k| (k, rng.gen_range(-1.0..=1.0)))
        .collect();
    HermiteField::from_terms(SolitonModel::euclidean(n)?, degree, terms)
}

pub const BATTERY_PROFILE_C: [f64; 4] = [1.1, 1.5, 2.0, 3.0];

/// Rows 1 to 4 for `n ∈ {1,2,3}`, reverse profiles with
/// `c ∈ {1.1, 1.5, 2, 3}`, and `random_count` random fields with
/// `n ≤ 3`, degree `≤ 8`.
pub fn standard_battery(seed: u64, random_count: usize) -> Result<Vec<(String, InitialData)>> {
    let mut out = Vec::new();
    for n in 1..=3 {
        for row in 1..=4 {
            out.push((format!("row{row}/n{n}"), dictionary_row(row, n, None)?));
        }
        for c in BATTERY_PROFILE_C {
            out.push((format!("reverse/c{c}/n{n}"), dictionary_row(6, n, Some(c))?));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..random_count {
        let n = rng.gen_range(1..=3usize);
        let degree = rng.gen_range(0..=8u32);
        out.push((format!("random{i}/n{n}/N{degree}"), InitialData::Field(random_field(&mut rng, n, degree)?)));
    }
    Ok(out)
}
