//! Spin-chain Hamiltonians and bases.
//!
//! Basis convention for every model: a configuration of `L` spins is an
//! integer label whose bit for site `s` (1-based) is bit `L − s`, i.e. site 1
//! is the most significant bit, and a set bit means `σ_z = +1` ("up").

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{eigh, ComplexMatrix, HermitianOperator, OrthonormalBasis, DEGENERACY_TOL};

/// Largest chain handled by [`sector_basis`].
pub const MAX_SECTOR_SITES: usize = 24;
/// Largest chain handled by the full-space builders.
pub const MAX_FULL_SPACE_SITES: usize = 14;
/// Largest dense matrix dimension the sector builders will allocate.
pub const MAX_DENSE_DIM: usize = 8192;

/// Parameters of the open XXZ chain with a Zeeman defect on site `delta`:
///
/// `H = ¼ Σ_{j<L} [J_xy (σˣσˣ + σʸσʸ) + J_z σᶻσᶻ]_{j,j+1} + ½ (ω Σ_j σᶻ_j + ε_δ σᶻ_δ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct XxzDefectParams {
    pub l: usize,
    pub n_up: usize,
    /// Defect site, 1-based.
    pub delta: usize,
    pub omega: f64,
    pub epsilon_delta: f64,
    pub j_xy: f64,
    pub j_z: f64,
}

impl XxzDefectParams {
    /// `ω = 0, ε_δ = 0.5, J_xy = 1, J_z = 0.5` in the `⌊L/3⌋`-up sector.
    pub fn reference(l: usize, delta: usize) -> Self {
        Self {
            l,
            n_up: l / 3,
            delta,
            omega: 0.0,
            epsilon_delta: 0.5,
            j_xy: 1.0,
            j_z: 0.5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.l == 0 || self.l > MAX_SECTOR_SITES {
            return Err(Error::Capacity {
                what: "XXZ chain length",
                requested: self.l,
                limit: MAX_SECTOR_SITES,
            });
        }
        if self.delta < 1 || self.delta > self.l {
            return Err(Error::invalid(
                "defect site",
                format!("defect site out of range: delta = {} not in 1..={}", self.delta, self.l),
            ));
        }
        if self.n_up > self.l {
            return Err(Error::invalid("spin sector", format!("n_up = {} exceeds L = {}", self.n_up, self.l)));
        }
        for (name, v) in [
            ("omega", self.omega),
            ("epsilon_delta", self.epsilon_delta),
            ("j_xy", self.j_xy),
            ("j_z", self.j_z),
        ] {
            if !v.is_finite() {
                return Err(Error::invalid("XXZ coupling", format!("{name} is not finite")));
            }
        }
        Ok(())
    }

    /// The non-interacting part: same parameters with `J_z = 0`.
    pub fn mean_field(&self) -> Self {
        Self { j_z: 0.0, ..*self }
    }
}

/// Transverse-field Ising chain with open boundaries,
/// `H = −(Σ_{j<L} σᶻ_j σᶻ_{j+1} + Σ_j (g σˣ_j + h σᶻ_j))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TfimParams {
    pub l: usize,
    pub g: f64,
    pub h: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    Integrable,
    Chaotic,
}

impl TfimParams {
    pub fn integrable(l: usize) -> Self {
        Self { l, g: 1.0, h: 0.0 }
    }

    pub fn chaotic(l: usize) -> Self {
        Self { l, g: -1.05, h: 0.5 }
    }

    /// Free-fermion solvable when either field vanishes.
    pub fn regime(&self) -> Regime {
        if self.h == 0.0 || self.g == 0.0 {
            Regime::Integrable
        } else {
            Regime::Chaotic
        }
    }
}

/// Fixed-magnetization sector: all `L`-bit labels with `n_up` set bits,
/// strictly increasing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpinSector {
    l: usize,
    n_up: usize,
    states: Vec<u32>,
}

impl SpinSector {
    pub fn l(&self) -> usize {
        self.l
    }

    pub fn n_up(&self) -> usize {
        self.n_up
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[u32] {
        &self.states
    }

    pub fn index_of(&self, label: u32) -> Option<usize> {
        self.states.binary_search(&label).ok()
    }

    /// Label rendered as `L` characters, site 1 first (`1` = up).
    pub fn label_string(&self, k: usize) -> String {
        format!("{:0width$b}", self.states[k], width = self.l)
    }

    pub fn labels(&self) -> Vec<String> {
        (0..self.dim()).map(|k| self.label_string(k)).collect()
    }

    /// The site (`σ_z`) basis of the sector, labelled by bitstrings.
    pub fn site_basis(&self) -> OrthonormalBasis {
        OrthonormalBasis::computational(self.dim())
            .with_labels(self.labels())
            .expect("label count equals sector dimension")
    }
}

/// Bit position of 1-based `site` in an `l`-site label.
#[inline]
fn bit(l: usize, site: usize) -> u32 {
    1 << (l - site)
}

/// `σ_z` eigenvalue (`±1`) of 1-based `site` in `label`.
#[inline]
pub fn spin_z(label: u32, l: usize, site: usize) -> f64 {
    if label & bit(l, site) != 0 {
        1.0
    } else {
        -1.0
    }
}

pub fn sector_basis(l: usize, n_up: usize) -> Result<SpinSector> {
    if l > MAX_SECTOR_SITES {
        return Err(Error::Capacity {
            what: "spin sector length",
            requested: l,
            limit: MAX_SECTOR_SITES,
        });
    }
    if n_up > l {
        return Err(Error::invalid("spin sector", format!("n_up = {n_up} exceeds L = {l}")));
    }
    // Gosper's hack walks all n_up-subsets of l bits in increasing order.
    let mut states = Vec::new();
    if n_up == 0 {
        states.push(0);
    } else {
        let limit: u64 = 1 << l;
        let mut x: u64 = (1 << n_up) - 1;
        while x < limit {
            states.push(x as u32);
            let c = x & x.wrapping_neg();
            let r = x + c;
            x = (((r ^ x) >> 2) / c) | r;
        }
    }
    Ok(SpinSector { l, n_up, states })
}

fn real_symmetric(d: usize, data: Vec<f64>) -> HermitianOperator {
    let m = ComplexMatrix::new(d, d, data.into_iter().map(|x| Complex64::new(x, 0.0)).collect())
        .expect("builder produces finite entries");
    HermitianOperator::new(m).expect("builder produces a symmetric matrix")
}

/// XXZ-with-defect Hamiltonian restricted to its `n_up` sector, in the order
/// of [`sector_basis`].
pub fn build_xxz_defect(p: &XxzDefectParams) -> Result<HermitianOperator> {
    p.validate()?;
    let sector = sector_basis(p.l, p.n_up)?;
    build_xxz_defect_in(p, &sector)
}

pub(crate) fn build_xxz_defect_in(p: &XxzDefectParams, sector: &SpinSector) -> Result<HermitianOperator> {
    let d = sector.dim();
    if d < 2 {
        return Err(Error::invalid("spin sector", format!("dimension {d} < 2")));
    }
    if d > MAX_DENSE_DIM {
        return Err(Error::Capacity {
            what: "sector dimension",
            requested: d,
            limit: MAX_DENSE_DIM,
        });
    }
    let l = p.l;
    let mut data = vec![0.0; d * d];
    for (row, &s) in sector.states().iter().enumerate() {
        let mut diag = 0.0;
        for j in 1..l {
            let (a, b) = (bit(l, j), bit(l, j + 1));
            let (sa, sb) = (spin_z(s, l, j), spin_z(s, l, j + 1));
            diag += 0.25 * p.j_z * sa * sb;
            if sa != sb {
                // (σˣσˣ + σʸσʸ)/4 = (σ⁺σ⁻ + σ⁻σ⁺)/2 swaps an antiparallel pair
                let flipped = s ^ a ^ b;
                let col = sector.index_of(flipped).expect("hopping conserves magnetization");
                data[row * d + col] += 0.5 * p.j_xy;
            }
        }
        for j in 1..=l {
            diag += 0.5 * p.omega * spin_z(s, l, j);
        }
        diag += 0.5 * p.epsilon_delta * spin_z(s, l, p.delta);
        data[row * d + row] += diag;
    }
    Ok(real_symmetric(d, data))
}

/// Eigenbasis of the mean-field Hamiltonian (`J_z = 0`) together with the
/// smallest level gap of that Hamiltonian.
#[derive(Clone, Debug)]
pub struct MeanFieldBasis {
    pub basis: OrthonormalBasis,
    pub min_gap: f64,
}

impl MeanFieldBasis {
    /// Near-degenerate mean-field levels make the basis resolution-dependent.
    pub fn is_degenerate(&self) -> bool {
        self.min_gap < DEGENERACY_TOL
    }
}

pub fn mean_field_basis(p: &XxzDefectParams) -> Result<MeanFieldBasis> {
    let h0 = build_xxz_defect(&p.mean_field())?;
    let spec = eigh(&h0)?;
    Ok(MeanFieldBasis {
        min_gap: spec.min_gap(),
        basis: spec.basis(),
    })
}

fn check_full_space(l: usize, min: usize) -> Result<usize> {
    if l > MAX_FULL_SPACE_SITES {
        return Err(Error::Capacity {
            what: "full-space chain length",
            requested: l,
            limit: MAX_FULL_SPACE_SITES,
        });
    }
    if l < min {
        return Err(Error::invalid("chain length", format!("L = {l} < {min}")));
    }
    Ok(1 << l)
}

/// Transverse-field Ising Hamiltonian on the full `2^L` space.
pub fn build_tfim(p: &TfimParams) -> Result<HermitianOperator> {
    let d = check_full_space(p.l, 2)?;
    if !p.g.is_finite() || !p.h.is_finite() {
        return Err(Error::invalid("TFIM field", "non-finite g or h"));
    }
    let l = p.l;
    let mut data = vec![0.0; d * d];
    for s in 0..d as u32 {
        let row = s as usize;
        let mut diag = 0.0;
        for j in 1..l {
            diag -= spin_z(s, l, j) * spin_z(s, l, j + 1);
        }
        for j in 1..=l {
            diag -= p.h * spin_z(s, l, j);
            data[row * d + (s ^ bit(l, j)) as usize] -= p.g;
        }
        data[row * d + row] += diag;
    }
    Ok(real_symmetric(d, data))
}

/// `H^{(k)} = Σ_{j=1}^{L−k+1} σˣ_j σˣ_{j+1} ⋯ σˣ_{j+k−1}` on the full space.
pub fn build_k_local_commuting(l: usize, k: usize) -> Result<HermitianOperator> {
    let d = check_full_space(l, 1)?;
    if k < 1 || k > l {
        return Err(Error::invalid("locality", format!("k = {k} not in 1..={l}")));
    }
    let mut data = vec![0.0; d * d];
    for j in 1..=(l - k + 1) {
        let mask: u32 = (j..j + k).map(|s| bit(l, s)).fold(0, |m, b| m | b);
        for s in 0..d as u32 {
            data[s as usize * d + (s ^ mask) as usize] += 1.0;
        }
    }
    Ok(real_symmetric(d, data))
}

/// Diagonal of `σᶻ_site` on the full `2^L` space.
pub fn sigma_z_diagonal(l: usize, site: usize) -> Result<Vec<f64>> {
    let d = check_full_space(l, 1)?;
    if site < 1 || site > l {
        return Err(Error::invalid("site", format!("site {site} not in 1..={l}")));
    }
    Ok((0..d as u32).map(|s| spin_z(s, l, site)).collect())
}
