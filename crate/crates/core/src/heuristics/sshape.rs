//! S-shaped routing: every visited aisle is traversed completely, except the
//! last one when the number of visited aisles is odd; that aisle is entered
//! from the front up to its furthest item.
//!
//! All sums here alternate in sign with binomial weights and are carried out
//! in double-double arithmetic. Integrals of such sums are taken over the
//! combined (small, smooth) integrand rather than term by term.

use super::{Terms, Travel, WarehouseConfig};
use crate::error::Result;
use crate::ext::{binomial, Dd, DdSum};
use crate::prelim::AisleModel;

/// Expectations entering the S-shaped moments. `X = ΣI_i` is the number of
/// visited aisles, `I = I_odd` and `A = A_{k+}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SShapeTerms {
    pub x: f64,
    pub x2: f64,
    pub iodd: f64,
    /// `E[M X]`
    pub mx: f64,
    /// `E[k+ X]`
    pub kx: f64,
    /// `E[I X]`
    pub ix: f64,
    /// `E[I k+]`
    pub ik: f64,
    /// `E[M I]`
    pub mi: f64,
    /// `E[I A]`
    pub ia: f64,
    /// `E[I A^2]`
    pub ia2: f64,
    /// `E[I A X]`
    pub iax: f64,
    /// `E[I A k+]`
    pub iak: f64,
    /// `E[M I A]`
    pub mia: f64,
}

fn pow2(e: u32) -> Dd {
    Dd::ONE.ldexp(e as i32)
}

fn signed(term: Dd, negative: bool) -> Dd {
    if negative {
        -term
    } else {
        term
    }
}

fn choose(n: u32, r: u32) -> Dd {
    Dd::from_u128(binomial(n, r))
}

/// Coefficients `β_l = Σ_{s odd} w_s C(s-1, l) (-1)^{s-1-l}` so that
/// `Σ_{s odd} w_s Δ^{s-1} F(z) = Σ_l β_l F(z + l)`.
fn odd_weights(k: u32, w: impl Fn(u32) -> Dd) -> Vec<Dd> {
    let mut beta = vec![DdSum::default(); k as usize];
    for s in (1..=k).step_by(2) {
        let ws = w(s);
        for (l, b) in beta.iter_mut().enumerate().take(s as usize) {
            let l = l as u32;
            b.add(signed(ws * choose(s - 1, l), (s - 1 - l) % 2 == 1));
        }
    }
    beta.into_iter().map(DdSum::value).collect()
}

impl SShapeTerms {
    pub fn compute(model: &AisleModel) -> Result<Self> {
        let k = model.k;
        let kf = k as f64;
        let kd = Dd::new(kf);
        let em = model.dist.mean();
        let odd = k % 2 == 1;
        let p = |num: u32| model.pgf_dd_grid(num);
        let pk1 = model.p((kf - 1.0) / kf);

        let occ = model.occupancy_law();
        let iodd = model.iodd_mean();

        let mx = kf * em - (kf - 1.0) * model.dp((kf - 1.0) / kf);
        let kx = kf * kf - kf * (kf + 1.0) * pk1 + (1..=k).map(|j| model.p((j - 1) as f64 / kf)).sum::<f64>();

        // E[I X]
        let pk1_dd = p(k - 1);
        let mut ix = DdSum::default();
        if odd {
            ix.add(kd - pk1_dd.mul_f64(kf * kf));
        } else {
            ix.add(pk1_dd.mul_f64(kf * (kf - 1.0)));
        }
        for l in 0..k.saturating_sub(1) {
            let t = p(l) * choose(k, l) * pow2(k - l - 2).mul_f64((k + l) as f64);
            ix.add(signed(t, l % 2 == 0));
        }

        // E[I k+]
        let mut ik = DdSum::default();
        for l in 1..=k {
            for m in 0..l.saturating_sub(1) {
                let t = p(m) * choose(l, m) * pow2(l - m - 2).mul_f64((m + l) as f64);
                ik.add(signed(t, m % 2 == 0));
            }
            let lf = l as f64;
            if l % 2 == 0 {
                ik.add(p(l - 1).mul_f64(lf * (lf - 1.0)));
            } else {
                ik.add(p(l).mul_f64(lf) - p(l - 1).mul_f64(lf * lf));
            }
        }

        // E[M I]
        let mut mi = DdSum::default();
        if odd {
            mi.add(Dd::new(em));
        }
        for l in 0..k.saturating_sub(1) {
            let x = Dd::new((1 + l) as f64) / kd;
            let t = model.dist.pgf_prime_dd(x) * choose(k - 1, l) * pow2(k - 2 - l);
            mi.add(signed(t, l % 2 == 1));
        }

        // Terms with A = A_{k+}: E[A g 1{I = S}] depends only on |S| = s, and
        // equals Δ^{s-1}F(1) - ∫Δ^{s-1}F(z) dz with F(z) = P(z/k).
        let beta_a = odd_weights(k, |s| choose(k, s));
        let beta_ax = odd_weights(k, |s| choose(k, s).mul_f64(s as f64));
        let beta_ak = odd_weights(k, |s| choose(k + 1, s + 1).mul_f64(s as f64));
        let pgf = |x: Dd| model.pgf_dd_at(x);
        let pgf_x_prime = |x: Dd| x * model.dist.pgf_prime_dd(x);
        let combo = |beta: &[Dd], f: &dyn Fn(Dd) -> Dd, z: f64| -> f64 {
            let zd = Dd::new(z);
            let mut acc = DdSum::default();
            for (l, b) in beta.iter().enumerate() {
                acc.add(*b * f((zd + Dd::new(l as f64)) / kd));
            }
            acc.value().to_f64()
        };
        let ia_at1 = combo(&beta_a, &pgf, 1.0);
        let ia = ia_at1 - model.integrate_unit(|z| combo(&beta_a, &pgf, z))?;
        let ia2 = ia_at1 - 2.0 * model.integrate_unit(|z| z * combo(&beta_a, &pgf, z))?;
        let iax = combo(&beta_ax, &pgf, 1.0) - model.integrate_unit(|z| combo(&beta_ax, &pgf, z))?;
        let iak = combo(&beta_ak, &pgf, 1.0) - model.integrate_unit(|z| combo(&beta_ak, &pgf, z))?;
        let mia = combo(&beta_a, &pgf_x_prime, 1.0)
            - model.integrate_unit(|z| combo(&beta_a, &pgf_x_prime, z))?;

        Ok(Self {
            x: occ.mean,
            x2: occ.second,
            iodd,
            mx,
            kx,
            ix: ix.value().to_f64(),
            ik: ik.value().to_f64(),
            mi: mi.value().to_f64(),
            ia,
            ia2,
            iax,
            iak,
            mia,
        })
    }
}

/// `W = (l/v)(X + I(2A - 1))`.
pub(crate) fn travel(model: &AisleModel, cfg: &WarehouseConfig) -> Result<Travel> {
    let t = SShapeTerms::compute(model)?;
    let u = cfg.l / cfg.v;

    let mut mean = Terms::new("s-shaped E[Y]");
    mean.add("E[X]", t.x);
    mean.add("2E[IA]", 2.0 * t.ia);
    mean.add("-E[I]", -t.iodd);

    let mut sq = Terms::new("s-shaped E[Y^2]");
    sq.add("E[X^2]", t.x2);
    sq.add("4E[IA^2]", 4.0 * t.ia2);
    sq.add("E[I]", t.iodd);
    sq.add("4E[IAX]", 4.0 * t.iax);
    sq.add("-2E[IX]", -2.0 * t.ix);
    sq.add("-4E[IA]", -4.0 * t.ia);

    let mut m = Terms::new("s-shaped E[MY]");
    m.add("E[MX]", t.mx);
    m.add("2E[MIA]", 2.0 * t.mia);
    m.add("-E[MI]", -t.mi);

    let mut kk = Terms::new("s-shaped E[k+ Y]");
    kk.add("E[k+ X]", t.kx);
    kk.add("2E[IAk+]", 2.0 * t.iak);
    kk.add("-E[Ik+]", -t.ik);

    Ok(Travel {
        mean: u * mean.total(),
        second: u * u * sq.total(),
        cross_m: u * m.total(),
        cross_k: u * kk.total(),
    })
}
