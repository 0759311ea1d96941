//! Dense statevector simulation over registers of arbitrary dimension.
//!
//! Registers are `Z_N`-valued, not qubits. The forward Fourier transform is
//! `|x> -> N^(-1/2) sum_y e^(2 pi i x y / N) |y>`; the inverse uses the
//! conjugate kernel.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use rand::Rng;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::field::FieldSpec;

/// Tolerance for norm and equality checks.
pub const TOLERANCE: f64 = 1e-9;

/// Largest dimension transformed by direct O(N^2) summation.
pub const DIRECT_QFT_MAX: usize = 4096;

/// Amplitudes below this magnitude count as zero.
pub const ZERO_AMPLITUDE: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Direction::Forward => 1.0,
            Direction::Inverse => -1.0,
        }
    }

    pub fn reverse(self) -> Self {
        match self {
            Direction::Forward => Direction::Inverse,
            Direction::Inverse => Direction::Forward,
        }
    }
}

fn twiddles(n: usize, dir: Direction) -> Vec<Complex64> {
    (0..n)
        .map(|k| Complex64::from_polar(1.0, dir.sign() * 2.0 * PI * k as f64 / n as f64))
        .collect()
}

/// Unitary DFT over `Z_N` by direct summation.
pub fn qft_direct(input: &[Complex64], dir: Direction) -> Vec<Complex64> {
    let n = input.len();
    let w = twiddles(n, dir);
    let scale = 1.0 / (n as f64).sqrt();
    (0..n)
        .map(|y| {
            let mut acc = ZERO;
            let mut k = 0usize;
            for &a in input {
                acc += a * w[k];
                k += y;
                if k >= n {
                    k -= n;
                }
            }
            acc * scale
        })
        .collect()
}

/// Unitary DFT over `Z_N` in O(N log N); non-smooth lengths go through
/// Bluestein's chirp-z reduction inside the planner.
pub fn qft_fast(input: &[Complex64], dir: Direction) -> Vec<Complex64> {
    let n = input.len();
    let mut planner = FftPlanner::<f64>::new();
    // rustfft's forward kernel is e^(-2 pi i xy/N)
    let fft = match dir {
        Direction::Forward => planner.plan_fft_inverse(n),
        Direction::Inverse => planner.plan_fft_forward(n),
    };
    let mut buf = input.to_vec();
    fft.process(&mut buf);
    let scale = 1.0 / (n as f64).sqrt();
    buf.iter_mut().for_each(|a| *a *= scale);
    buf
}

/// Row-major tensor layout: the first register is the most significant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegisterLayout {
    dims: Vec<usize>,
}

impl RegisterLayout {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::InvalidInput("register dimensions must be positive".into()));
        }
        Ok(Self { dims })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn stride(&self, axis: usize) -> usize {
        self.dims[axis + 1..].iter().product()
    }

    pub fn encode(&self, digits: &[usize]) -> usize {
        debug_assert_eq!(digits.len(), self.dims.len());
        digits
            .iter()
            .zip(&self.dims)
            .fold(0, |acc, (&d, &m)| acc * m + d)
    }

    pub fn decode(&self, mut index: usize) -> Vec<usize> {
        let mut digits = vec![0; self.dims.len()];
        for (slot, &m) in digits.iter_mut().zip(&self.dims).rev() {
            *slot = index % m;
            index /= m;
        }
        digits
    }
}

/// A normalized vector of complex amplitudes over `0..dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<Complex64>,
}

impl StateVector {
    /// # Panics
    /// If `index >= dim`.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index {index} outside dimension {dim}");
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Self { amps }
    }

    pub fn uniform(dim: usize) -> Self {
        assert!(dim > 0);
        let a = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Self { amps: vec![a; dim] }
    }

    /// Wraps amplitudes that are already normalized.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = amps.iter().map(Complex64::norm_sqr).sum();
        if amps.is_empty() || (norm - 1.0).abs() > TOLERANCE {
            return Err(Error::InvalidInput(format!("state norm^2 is {norm}, expected 1")));
        }
        Ok(Self { amps })
    }

    /// Normalizes arbitrary nonzero amplitudes.
    pub fn normalized(mut amps: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = amps.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
        if amps.is_empty() || norm == 0.0 {
            return Err(Error::InvalidInput("cannot normalize a zero vector".into()));
        }
        amps.iter_mut().for_each(|a| *a /= norm);
        Ok(Self { amps })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(Complex64::norm_sqr).sum()
    }

    fn debug_check_norm(&self) {
        debug_assert!(
            (self.norm_sqr() - 1.0).abs() < TOLERANCE,
            "norm drifted to {}",
            self.norm_sqr()
        );
    }

    /// Fourier transform over `Z_dim`.
    pub fn qft(&mut self, dir: Direction) {
        self.amps = if self.dim() <= DIRECT_QFT_MAX {
            qft_direct(&self.amps, dir)
        } else {
            qft_fast(&self.amps, dir)
        };
        self.debug_check_norm();
    }

    /// Fourier transform over one register of a tensor layout covering the
    /// first `layout.total()` indices; indices beyond are untouched.
    pub fn qft_register(&mut self, layout: &RegisterLayout, axis: usize, dir: Direction) -> Result<()> {
        let total = layout.total();
        if total > self.dim() {
            return Err(Error::DimensionMismatch {
                expected: total,
                actual: self.dim(),
            });
        }
        let size = layout.dims()[axis];
        let stride = layout.stride(axis);
        let block = size * stride;
        let w = twiddles(size, dir);
        let scale = 1.0 / (size as f64).sqrt();
        let mut fiber = vec![ZERO; size];
        for base in (0..total).step_by(block) {
            for inner in 0..stride {
                let start = base + inner;
                for (k, slot) in fiber.iter_mut().enumerate() {
                    *slot = self.amps[start + k * stride];
                }
                for y in 0..size {
                    let mut acc = ZERO;
                    for (x, &a) in fiber.iter().enumerate() {
                        acc += a * w[x * y % size];
                    }
                    self.amps[start + y * stride] = acc * scale;
                }
            }
        }
        self.debug_check_norm();
        Ok(())
    }

    /// Multiplies each amplitude by `phase(index)`, which must be a unit
    /// wherever the amplitude is nonzero.
    pub fn apply_phase<F>(&mut self, phase: F) -> Result<()>
    where
        F: Fn(usize) -> Complex64,
    {
        let mut out = self.amps.clone();
        for (i, a) in out.iter_mut().enumerate() {
            let u = phase(i);
            if a.norm() > ZERO_AMPLITUDE && (u.norm() - 1.0).abs() > TOLERANCE {
                return Err(Error::NonUnitPhase { index: i });
            }
            *a *= u;
        }
        self.amps = out;
        self.debug_check_norm();
        Ok(())
    }

    /// Relabels the basis: the amplitude at `x` moves to `map(x)`.
    pub fn permute_basis<F>(&mut self, map: F) -> Result<()>
    where
        F: Fn(usize) -> usize,
    {
        let n = self.dim();
        let mut out = vec![ZERO; n];
        let mut hit = vec![false; n];
        for (x, &a) in self.amps.iter().enumerate() {
            let y = map(x);
            if y >= n || hit[y] {
                return Err(Error::NotBijective);
            }
            hit[y] = true;
            out[y] = a;
        }
        self.amps = out;
        Ok(())
    }

    /// Exact `|amp|^2` vector.
    pub fn distribution(&self) -> Vec<f64> {
        self.amps.iter().map(Complex64::norm_sqr).collect()
    }

    /// Projects onto the span of indices satisfying `predicate`. Returns the
    /// branch probability and the renormalized branch, if it has support.
    pub fn project<P>(&self, predicate: P) -> (f64, Option<StateVector>)
    where
        P: Fn(usize) -> bool,
    {
        let amps: Vec<Complex64> = self
            .amps
            .iter()
            .enumerate()
            .map(|(i, &a)| if predicate(i) { a } else { ZERO })
            .collect();
        let prob: f64 = amps.iter().map(Complex64::norm_sqr).sum();
        if prob <= ZERO_AMPLITUDE * ZERO_AMPLITUDE {
            return (prob, None);
        }
        let scale = 1.0 / prob.sqrt();
        let amps = amps.into_iter().map(|a| a * scale).collect();
        (prob, Some(StateVector { amps }))
    }

    /// Computational-basis measurement; collapses to the observed index.
    pub fn measure<R: Rng + ?Sized>(&mut self, rng: &mut R) -> usize {
        let dist = self.distribution();
        let total: f64 = dist.iter().sum();
        let draw = rng.gen::<f64>() * total;
        let mut acc = 0.0;
        let mut outcome = None;
        for (i, &p) in dist.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            acc += p;
            outcome = Some(i);
            if draw < acc {
                break;
            }
        }
        let outcome = outcome.expect("state has support");
        *self = StateVector::basis(self.dim(), outcome);
        outcome
    }

    /// Two-outcome measurement of `predicate`; collapses to the observed
    /// branch.
    pub fn measure_predicate<P, R>(&mut self, predicate: P, rng: &mut R) -> bool
    where
        P: Fn(usize) -> bool,
        R: Rng + ?Sized,
    {
        let (p_true, yes) = self.project(&predicate);
        let outcome = match yes {
            Some(_) if p_true >= 1.0 => true,
            Some(_) => rng.gen::<f64>() < p_true,
            None => false,
        };
        if outcome {
            *self = yes.expect("branch has support");
        } else {
            let (_, no) = self.project(|i| !predicate(i));
            *self = no.expect("complement branch has support");
        }
        outcome
    }

    /// Trace-Fourier transform `|x> -> q^(-1/2) sum_y w_p^Tr(xy) |y>` on the
    /// first `q` indices (field elements in index order); later indices are
    /// left alone.
    ///
    /// Realized as the trace-coordinate relabeling `x -> T(x)` followed by a
    /// `Z_p` transform on each of the `r` digits. The inverse runs the same
    /// steps backwards.
    pub fn trace_fourier_transform(&mut self, field: &FieldSpec, dir: Direction) -> Result<()> {
        let q = field.q();
        if self.dim() < q {
            return Err(Error::DimensionMismatch {
                expected: q,
                actual: self.dim(),
            });
        }
        let layout = RegisterLayout::new(vec![field.p() as usize; field.r()])?;
        let relabel: Vec<usize> = (0..q)
            .map(|i| {
                let coords = field.trace_coordinates(&field.from_index(i));
                // digit j has stride p^j, matching the element index order
                coords
                    .iter()
                    .rev()
                    .fold(0usize, |acc, &c| acc * field.p() as usize + c as usize)
            })
            .collect();
        let forward = |i: usize| if i < q { relabel[i] } else { i };
        match dir {
            Direction::Forward => {
                self.permute_basis(forward)?;
                for axis in 0..field.r() {
                    self.qft_register(&layout, axis, Direction::Forward)?;
                }
            }
            Direction::Inverse => {
                for axis in 0..field.r() {
                    self.qft_register(&layout, axis, Direction::Inverse)?;
                }
                let mut back = (0..self.dim()).collect::<Vec<_>>();
                for (i, &t) in relabel.iter().enumerate() {
                    back[t] = i;
                }
                self.permute_basis(|i| back[i])?;
            }
        }
        Ok(())
    }

    /// True iff `||self - u other|| <= tol` for the unit `u` fixed by the
    /// largest-magnitude amplitude of `other`.
    pub fn equal_up_to_global_phase(&self, other: &StateVector, tol: f64) -> bool {
        if self.dim() != other.dim() {
            return false;
        }
        let (k, _) = other
            .amps
            .iter()
            .enumerate()
            .fold((0, -1.0), |best, (i, a)| if a.norm() > best.1 { (i, a.norm()) } else { best });
        if self.amps[k].norm() <= ZERO_AMPLITUDE {
            return false;
        }
        let ratio = self.amps[k] / other.amps[k];
        let u = ratio / ratio.norm();
        let dist: f64 = self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - u * b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        dist <= tol
    }

    /// Debug dump: `index<TAB>re<TAB>im` per line, tiny amplitudes omitted.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (i, a) in self.amps.iter().enumerate() {
            if a.norm() >= ZERO_AMPLITUDE {
                let _ = writeln!(out, "{i}\t{}\t{}", a.re, a.im);
            }
        }
        out
    }
}

/// Largest entrywise deviation between two amplitude vectors.
pub fn max_deviation(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
