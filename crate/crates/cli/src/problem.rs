//! Problem generation with controlled spectra.

use grsd_core::error::{Error, Result};
use grsd_core::rayleigh::{spectral_data, SpectralData, SymmetricPSDMatrix};
use grsd_core::sampling;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

/// Parametric spectrum families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum SpectrumGen {
    /// lambda_i = n - i + 1: evenly spaced, eigengap 1 everywhere.
    Linear,
    /// lambda_i = 4 * 0.8^(i-1).
    Geometric,
    /// Leading block above 2 + delta, trailing block descending from 2:
    /// eigengap exactly delta at position k, gamma > 0 even when delta = 0.
    Clustered,
}

/// Where the spectrum comes from.
#[derive(Clone, Debug)]
pub enum SpectrumSource {
    Explicit(Vec<f64>),
    Generator { gen: SpectrumGen, delta: f64 },
}

/// A reproducible synthetic problem: A = Q diag(spectrum) Q^T.
#[derive(Clone, Debug)]
pub struct ProblemSpec {
    pub n: usize,
    pub k: usize,
    pub spectrum: SpectrumSource,
    /// Conjugate by a seeded random orthogonal matrix; identity otherwise.
    pub rotate: bool,
    pub seed: u64,
}

pub fn generate_spectrum(gen: SpectrumGen, n: usize, k: usize, delta: f64) -> Result<Vec<f64>> {
    if n < 2 || k == 0 || k >= n {
        return Err(Error::BadK { n, k });
    }
    if !(delta >= 0.0) {
        return Err(Error::BadSpectrum(format!(
            "eigengap must be non-negative, got {delta}"
        )));
    }
    let spectrum = match gen {
        SpectrumGen::Linear => (0..n).map(|i| (n - i) as f64).collect(),
        SpectrumGen::Geometric => (0..n).map(|i| 4.0 * 0.8f64.powi(i as i32)).collect(),
        SpectrumGen::Clustered => {
            let mut s: Vec<f64> = (0..k)
                .map(|i| 2.0 + delta + 0.1 * (k - 1 - i) as f64)
                .collect();
            s.extend((0..n - k).map(|j| 2.0 - j as f64 / (n - k) as f64));
            s
        }
    };
    Ok(spectrum)
}

impl ProblemSpec {
    pub fn resolved_spectrum(&self) -> Result<Vec<f64>> {
        let spectrum = match &self.spectrum {
            SpectrumSource::Explicit(s) => s.clone(),
            SpectrumSource::Generator { gen, delta } => {
                generate_spectrum(*gen, self.n, self.k, *delta)?
            }
        };
        if spectrum.len() != self.n {
            return Err(Error::BadSpectrum(format!(
                "spectrum has {} entries but n = {}",
                spectrum.len(),
                self.n
            )));
        }
        sampling::validate_spectrum(&spectrum)?;
        Ok(spectrum)
    }
}

/// Builds A = Q diag(spectrum) Q^T and its spectral data, checking that the
/// realized eigenvalues agree with the prescription to 1e-9.
pub fn generate_problem(spec: &ProblemSpec) -> Result<(SymmetricPSDMatrix, SpectralData)> {
    if spec.k == 0 || spec.k >= spec.n {
        return Err(Error::BadK {
            n: spec.n,
            k: spec.k,
        });
    }
    let spectrum = spec.resolved_spectrum()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let a = sampling::psd_with_spectrum(&spectrum, spec.rotate, &mut rng)?;
    let data = spectral_data(&a, spec.k)?;
    let scale = 1.0 + spectrum[0].abs();
    for (realized, prescribed) in data.eigenvalues.iter().zip(spectrum.iter()) {
        if (realized - prescribed).abs() > 1e-9 * scale {
            return Err(Error::BadSpectrum(format!(
                "realized eigenvalue {realized} deviates from prescribed {prescribed}"
            )));
        }
    }
    Ok((a, data))
}
