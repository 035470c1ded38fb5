//! Per-subcarrier channel synthesis: path loss, Rician communication links,
//! the LoS base-station-to-RIS link and the radar path vectors.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Error, Result};
use crate::geometry::{angles_between, upa_steering, AnglePair, ArrayGeometry, SubcarrierGrid};
use crate::linalg::{outer_t, CMat, CVec, C64};
use crate::scenario::{Point3, ScenarioConfig};

/// Distance-dependent amplitude gain `√(K_0·(r_0/r)^ε)`.
pub fn path_gain(k0: f64, r0: f64, r: f64, eps: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(invalid(format!("path distance must be positive, got {r}")));
    }
    Ok((k0 * (r0 / r).powf(eps)).sqrt())
}

/// Circularly-symmetric standard complex normal sample.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Radar scatterer selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scatterer {
    Target(usize),
    Clutter(usize),
}

/// All channels of one realization. Outer vectors are indexed by user,
/// target or clutter patch, inner vectors by subcarrier.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    pub seed: u64,
    pub h_dir: Vec<Vec<CMat>>,
    pub h_ris: Vec<Vec<CMat>>,
    pub g: Vec<CMat>,
    pub h_target: Vec<Vec<CVec>>,
    pub b_target: Vec<Vec<CVec>>,
    pub h_clutter: Vec<Vec<CVec>>,
    pub b_clutter: Vec<Vec<CVec>>,
    pub target_rcs: Vec<f64>,
    pub clutter_rcs: Vec<f64>,
}

struct Link<'a> {
    rx: &'a ArrayGeometry,
    tx: &'a ArrayGeometry,
    rx_pos: Point3,
    tx_pos: Point3,
    rician: f64,
    paths: usize,
    gain: f64,
}

/// Draws the NLoS geometry of one link and evaluates it on every subcarrier.
fn rician_link<R: Rng + ?Sized>(link: &Link<'_>, grid: &SubcarrierGrid, rng: &mut R) -> Result<Vec<CMat>> {
    let (w_los, w_nlos) = if link.rician.is_infinite() {
        (1.0, 0.0)
    } else {
        ((link.rician / (1.0 + link.rician)).sqrt(), (1.0 / (1.0 + link.rician)).sqrt())
    };
    let mut scatter = Vec::with_capacity(link.paths);
    for _ in 0..link.paths {
        let arrive = AnglePair { azimuth: rng.random::<f64>() * 2.0 * PI, elevation: rng.random::<f64>() * FRAC_PI_2 };
        let depart = AnglePair { azimuth: rng.random::<f64>() * 2.0 * PI, elevation: rng.random::<f64>() * FRAC_PI_2 };
        let amp = complex_normal(rng) * (link.gain / (link.paths as f64).sqrt());
        scatter.push((arrive, depart, amp));
    }
    let los_rx = angles_between(link.rx_pos, link.tx_pos)?;
    let los_tx = angles_between(link.tx_pos, link.rx_pos)?;
    let mut out = Vec::with_capacity(grid.count);
    for k in 0..grid.count {
        let f = grid.frequency(k);
        let mut h = CMat::zeros(link.rx.len(), link.tx.len());
        if w_los > 0.0 {
            let a_rx = upa_steering(link.rx, f, los_rx)?;
            let a_tx = upa_steering(link.tx, f, los_tx)?;
            h += outer_t(&a_rx, &a_tx) * C64::new(w_los * link.gain, 0.0);
        }
        if w_nlos > 0.0 {
            for (arrive, depart, amp) in &scatter {
                let a_rx = upa_steering(link.rx, f, *arrive)?;
                let a_tx = upa_steering(link.tx, f, *depart)?;
                h += outer_t(&a_rx, &a_tx) * (*amp * w_nlos);
            }
        }
        out.push(h);
    }
    Ok(out)
}

/// Direct base-station-to-user channels `H_dir[u][k]` (`N_U × N_B`).
pub fn build_comm_direct<R: Rng + ?Sized>(cfg: &ScenarioConfig, rng: &mut R) -> Result<Vec<Vec<CMat>>> {
    let (rx, tx) = (cfg.user_geometry(), cfg.rhs_geometry());
    let dist = cfg.link_distances();
    let c = &cfg.channel;
    cfg.positions
        .users
        .iter()
        .enumerate()
        .map(|(u, pos)| {
            let gain = path_gain(cfg.pathloss_ref(), c.ref_distance_m, dist.bs_user[u], c.exponents.bs_user)?;
            let link = Link {
                rx: &rx,
                tx: &tx,
                rx_pos: *pos,
                tx_pos: cfg.positions.base_station,
                rician: c.rician_direct,
                paths: c.nlos_direct,
                gain,
            };
            rician_link(&link, &cfg.grid(), rng)
        })
        .collect()
}

/// RIS-to-user channels `H_ris[u][k]` (`N_U × N_R`).
pub fn build_comm_ris<R: Rng + ?Sized>(cfg: &ScenarioConfig, rng: &mut R) -> Result<Vec<Vec<CMat>>> {
    let (rx, tx) = (cfg.user_geometry(), cfg.ris_geometry());
    let dist = cfg.link_distances();
    let c = &cfg.channel;
    cfg.positions
        .users
        .iter()
        .enumerate()
        .map(|(u, pos)| {
            let gain = path_gain(cfg.pathloss_ref(), c.ref_distance_m, dist.ris_user[u], c.exponents.ris_user)?;
            let link = Link {
                rx: &rx,
                tx: &tx,
                rx_pos: *pos,
                tx_pos: cfg.positions.ris,
                rician: c.rician_ris,
                paths: c.nlos_ris,
                gain,
            };
            rician_link(&link, &cfg.grid(), rng)
        })
        .collect()
}

/// LoS base-station-to-RIS channels `G[k]` (`N_R × N_B`), rank one.
pub fn build_bs_ris(cfg: &ScenarioConfig) -> Result<Vec<CMat>> {
    let p = &cfg.positions;
    let c = &cfg.channel;
    let gain = path_gain(cfg.pathloss_ref(), c.ref_distance_m, cfg.link_distances().bs_ris, c.exponents.bs_ris)?;
    let at_ris = angles_between(p.ris, p.base_station)?;
    let at_bs = angles_between(p.base_station, p.ris)?;
    let grid = cfg.grid();
    (0..grid.count)
        .map(|k| {
            let f = grid.frequency(k);
            let a_r = upa_steering(&cfg.ris_geometry(), f, at_ris)?;
            let a_b = upa_steering(&cfg.rhs_geometry(), f, at_bs)?;
            Ok(outer_t(&a_r, &a_b) * C64::new(gain, 0.0))
        })
        .collect()
}

/// Radar path vectors: `(h_target, b_target, h_clutter, b_clutter)`, each `[index][k]`.
#[allow(clippy::type_complexity)]
pub fn build_radar_paths(
    cfg: &ScenarioConfig,
) -> Result<(Vec<Vec<CVec>>, Vec<Vec<CVec>>, Vec<Vec<CVec>>, Vec<Vec<CVec>>)> {
    let p = &cfg.positions;
    let c = &cfg.channel;
    let grid = cfg.grid();
    let k0 = cfg.pathloss_ref();
    let path = |from: Point3, geom: &ArrayGeometry, to: Point3, eps: f64| -> Result<Vec<CVec>> {
        let gain = path_gain(k0, c.ref_distance_m, crate::geometry::distance(from, to), eps)?;
        let angles = angles_between(from, to)?;
        (0..grid.count)
            .map(|k| Ok(upa_steering(geom, grid.frequency(k), angles)? * C64::new(gain, 0.0)))
            .collect()
    };
    let (bs, ris) = (cfg.rhs_geometry(), cfg.ris_geometry());
    let e = &c.exponents;
    let mut out = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for t in &p.targets {
        out.0.push(path(p.base_station, &bs, *t, e.radar_direct)?);
        out.1.push(path(p.ris, &ris, *t, e.ris_radar)?);
    }
    for q in &p.clutter {
        out.2.push(path(p.base_station, &bs, *q, e.radar_direct)?);
        out.3.push(path(p.ris, &ris, *q, e.ris_radar)?);
    }
    Ok(out)
}

/// Composite two-way radar channel `α·v·vᵀ` with `v = h + Gᵀ·diag(φ)·b`.
pub fn compose_radar_channel(h: &CVec, b: &CVec, g: &CMat, phi: &CVec, alpha: f64) -> Result<CMat> {
    let v = radar_path(h, b, g, phi)?;
    Ok(outer_t(&v, &v) * C64::new(alpha, 0.0))
}

/// One-way effective path `h + Gᵀ·diag(φ)·b`.
pub fn radar_path(h: &CVec, b: &CVec, g: &CMat, phi: &CVec) -> Result<CVec> {
    if g.nrows() != b.len() || g.ncols() != h.len() || phi.len() != b.len() {
        return Err(invalid(format!(
            "radar path dimensions: h {}, b {}, G {}x{}, phi {}",
            h.len(),
            b.len(),
            g.nrows(),
            g.ncols(),
            phi.len()
        )));
    }
    let weighted = b.component_mul(phi);
    Ok(h + g.transpose() * weighted)
}

impl ChannelSet {
    /// Deterministic synthesis from `(cfg, seed)`. The seed drives only the
    /// NLoS geometry and gains; LoS parts and radar paths are deterministic.
    pub fn synthesize(cfg: &ScenarioConfig, seed: u64) -> Result<Self> {
        cfg.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h_dir = build_comm_direct(cfg, &mut rng)?;
        let h_ris = build_comm_ris(cfg, &mut rng)?;
        let g = build_bs_ris(cfg)?;
        let (h_target, b_target, h_clutter, b_clutter) = build_radar_paths(cfg)?;
        Ok(Self {
            seed,
            h_dir,
            h_ris,
            g,
            h_target,
            b_target,
            h_clutter,
            b_clutter,
            target_rcs: vec![cfg.radar.target_rcs; cfg.num_targets()],
            clutter_rcs: vec![cfg.radar.clutter_rcs; cfg.num_clutter()],
        })
    }

    /// Same realization with every RIS contribution removed.
    pub fn without_ris(&self) -> Self {
        let mut out = self.clone();
        let zero_m = |m: &mut CMat| m.fill(C64::new(0.0, 0.0));
        let zero_v = |v: &mut CVec| v.fill(C64::new(0.0, 0.0));
        out.h_ris.iter_mut().flatten().for_each(zero_m);
        out.g.iter_mut().for_each(zero_m);
        out.b_target.iter_mut().flatten().for_each(zero_v);
        out.b_clutter.iter_mut().flatten().for_each(zero_v);
        out
    }

    pub fn num_subcarriers(&self) -> usize {
        self.g.len()
    }
    pub fn num_users(&self) -> usize {
        self.h_dir.len()
    }
    pub fn num_targets(&self) -> usize {
        self.h_target.len()
    }
    pub fn num_clutter(&self) -> usize {
        self.h_clutter.len()
    }
    pub fn n_bs(&self) -> usize {
        self.g[0].ncols()
    }
    pub fn n_ris(&self) -> usize {
        self.g[0].nrows()
    }
    pub fn n_user(&self) -> usize {
        self.h_dir[0][0].nrows()
    }

    /// Effective user channel `H_dir + H_ris·diag(φ)·G` on subcarrier `k`.
    pub fn comm_channel(&self, u: usize, k: usize, phi: &CVec) -> CMat {
        let mut scaled = self.g[k].clone();
        for (i, mut row) in scaled.row_iter_mut().enumerate() {
            row *= phi[i];
        }
        &self.h_dir[u][k] + &self.h_ris[u][k] * scaled
    }

    /// Path vectors and RCS of a scatterer on subcarrier `k`.
    pub fn scatterer(&self, s: Scatterer, k: usize) -> (&CVec, &CVec, f64) {
        match s {
            Scatterer::Target(t) => (&self.h_target[t][k], &self.b_target[t][k], self.target_rcs[t]),
            Scatterer::Clutter(q) => (&self.h_clutter[q][k], &self.b_clutter[q][k], self.clutter_rcs[q]),
        }
    }

    /// Effective one-way path of a scatterer, `h + Gᵀ·diag(φ)·b`.
    pub fn radar_path(&self, s: Scatterer, k: usize, phi: &CVec) -> CVec {
        let (h, b, _) = self.scatterer(s, k);
        let weighted = b.component_mul(phi);
        h + self.g[k].transpose() * weighted
    }

    /// Every scatterer other than target `t`: remaining targets first, then clutter.
    pub fn interferers(&self, t: usize) -> Vec<Scatterer> {
        (0..self.num_targets())
            .filter(|&j| j != t)
            .map(Scatterer::Target)
            .chain((0..self.num_clutter()).map(Scatterer::Clutter))
            .collect()
    }

    /// Text dump: a header line with the dimensions and seed, then one
    /// `name` line per matrix followed by its entries in row-major order,
    /// one `re im` pair per line.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "channelset seed={} K={} U={} T={} Q={} NB={} NR={} NU={}",
            self.seed,
            self.num_subcarriers(),
            self.num_users(),
            self.num_targets(),
            self.num_clutter(),
            self.n_bs(),
            self.n_ris(),
            self.n_user()
        );
        let mut emit = |name: String, rows: usize, cols: usize, vals: &mut dyn Iterator<Item = C64>| {
            let _ = writeln!(s, "{name} {rows} {cols}");
            for z in vals {
                let _ = writeln!(s, "{:.17e} {:.17e}", z.re, z.im);
            }
        };
        let rowmajor = |m: &CMat| -> Vec<C64> {
            (0..m.nrows()).flat_map(|i| (0..m.ncols()).map(move |j| m[(i, j)])).collect()
        };
        for (u, per_k) in self.h_dir.iter().enumerate() {
            for (k, m) in per_k.iter().enumerate() {
                emit(format!("h_dir u={u} k={k}"), m.nrows(), m.ncols(), &mut rowmajor(m).into_iter());
            }
        }
        for (u, per_k) in self.h_ris.iter().enumerate() {
            for (k, m) in per_k.iter().enumerate() {
                emit(format!("h_ris u={u} k={k}"), m.nrows(), m.ncols(), &mut rowmajor(m).into_iter());
            }
        }
        for (k, m) in self.g.iter().enumerate() {
            emit(format!("g k={k}"), m.nrows(), m.ncols(), &mut rowmajor(m).into_iter());
        }
        for (name, set) in [
            ("h_target", &self.h_target),
            ("b_target", &self.b_target),
            ("h_clutter", &self.h_clutter),
            ("b_clutter", &self.b_clutter),
        ] {
            for (i, per_k) in set.iter().enumerate() {
                for (k, v) in per_k.iter().enumerate() {
                    emit(format!("{name} i={i} k={k}"), v.len(), 1, &mut v.iter().cloned());
                }
            }
        }
        s
    }

    /// Parse the matrices of a [`ChannelSet::to_text`] dump back, in file order.
    pub fn parse_text_matrices(text: &str) -> Result<Vec<(String, CMat)>> {
        let bad = |msg: &str| Error::InvalidArgument(format!("channel dump: {msg}"));
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| bad("empty"))?;
        if !header.starts_with("channelset ") {
            return Err(bad("missing header"));
        }
        let mut out = Vec::new();
        while let Some(line) = lines.next() {
            let mut parts: Vec<&str> = line.split(' ').collect();
            if parts.len() < 3 {
                return Err(bad("malformed matrix line"));
            }
            let cols: usize = parts.pop().unwrap().parse().map_err(|_| bad("cols"))?;
            let rows: usize = parts.pop().unwrap().parse().map_err(|_| bad("rows"))?;
            let mut m = CMat::zeros(rows, cols);
            for i in 0..rows {
                for j in 0..cols {
                    let entry = lines.next().ok_or_else(|| bad("truncated"))?;
                    let (re, im) = entry.split_once(' ').ok_or_else(|| bad("entry"))?;
                    m[(i, j)] = C64::new(re.parse().map_err(|_| bad("re"))?, im.parse().map_err(|_| bad("im"))?);
                }
            }
            out.push((parts.join(" "), m));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::fro_sqr;

    fn tiny_cfg() -> ScenarioConfig {
        let mut cfg = ScenarioConfig::desk();
        cfg.arrays.rhs = crate::scenario::ArraySpec::square(2, 1.0 / 6.0);
        cfg.arrays.ris = crate::scenario::ArraySpec::square(2, 0.5);
        cfg.arrays.user = crate::scenario::ArraySpec::square(2, 0.5);
        cfg.band.subcarriers = 3;
        cfg
    }

    #[test]
    fn path_gain_examples() {
        assert!((path_gain(1e-3, 1.0, 1.0, 2.0).unwrap() - 0.0316227766).abs() < 1e-9);
        assert!((path_gain(1e-3, 1.0, 10.0, 2.0).unwrap() - 3.16227766e-3).abs() < 1e-11);
        assert_eq!(path_gain(1.0, 1.0, 1.0, 3.0).unwrap(), 1.0);
        assert!(path_gain(1.0, 1.0, 0.0, 2.0).is_err());
        // direct radar path to the first reference target
        let g = path_gain(1e-3, 1.0, 14f64.sqrt(), 2.4).unwrap();
        assert!((g - 0.0065).abs() < 5e-5);
    }

    #[test]
    fn bs_ris_link_is_rank_one_with_expected_norm() {
        let cfg = tiny_cfg();
        let g = build_bs_ris(&cfg).unwrap();
        let gain = path_gain(1e-3, 1.0, 75f64.sqrt(), 2.0).unwrap();
        for gk in &g {
            let fro = fro_sqr(gk).sqrt();
            assert!((fro - gain * 4.0).abs() < 1e-12 * (1.0 + fro));
            let sv = gk.clone().singular_values();
            assert!(sv[1] < 1e-12 * sv[0]);
        }
    }

    #[test]
    fn infinite_rician_factor_gives_rank_one_los() {
        let mut cfg = tiny_cfg();
        cfg.channel.rician_direct = f64::INFINITY;
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let h = build_comm_direct(&cfg, &mut rng).unwrap();
        let sv = h[0][0].clone().singular_values();
        assert!(sv[1] < 1e-12 * sv[0]);
        let gain = path_gain(1e-3, 1.0, cfg.link_distances().bs_user[0], 2.8).unwrap();
        assert!(h[0][0].iter().all(|z| (z.norm() - gain).abs() < 1e-14));
    }

    #[test]
    fn blockage_leaves_only_scattering() {
        let mut cfg = tiny_cfg();
        cfg.channel.rician_ris = 0.0;
        cfg.channel.nlos_ris = 0;
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let h = build_comm_ris(&cfg, &mut rng).unwrap();
        assert!(h.iter().flatten().all(|m| fro_sqr(m) == 0.0));

        cfg.channel.rician_ris = 1.0;
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let h = build_comm_ris(&cfg, &mut rng).unwrap();
        let gain = path_gain(1e-3, 1.0, cfg.link_distances().ris_user[0], 2.0).unwrap();
        let expect = gain * 0.5f64.sqrt();
        assert!(h[0][0].iter().all(|z| (z.norm() - expect).abs() < 1e-14));
    }

    #[test]
    fn radar_paths_have_constant_modulus() {
        let cfg = tiny_cfg();
        let (h, b, hc, _) = build_radar_paths(&cfg).unwrap();
        let g = path_gain(1e-3, 1.0, 14f64.sqrt(), 2.4).unwrap();
        assert!(h[0].iter().all(|v| v.iter().all(|z| (z.norm() - g).abs() < 1e-15)));
        assert_eq!(b.len(), 2);
        assert_eq!(hc.len(), 2);
    }

    #[test]
    fn compose_examples() {
        let h = CVec::from_element(2, C64::new(1.0, 0.0));
        let b = CVec::zeros(3);
        let g = CMat::from_element(3, 2, C64::new(0.3, -0.1));
        let phi = CVec::from_element(3, C64::new(0.0, 1.0));
        let m = compose_radar_channel(&h, &b, &g, &phi, 1.0).unwrap();
        assert!(m.iter().all(|z| (*z - C64::new(1.0, 0.0)).norm() < 1e-15));
        let m = compose_radar_channel(&h, &b, &g, &phi, 0.0).unwrap();
        assert!(m.iter().all(|z| z.norm() == 0.0));
        assert!(compose_radar_channel(&h, &CVec::zeros(2), &g, &phi, 1.0).is_err());
    }

    #[test]
    fn composite_channel_is_symmetric_rank_one() {
        let cfg = tiny_cfg();
        let ch = ChannelSet::synthesize(&cfg, 5).unwrap();
        let phi = CVec::from_fn(4, |i, _| crate::linalg::cis(0.7 * i as f64));
        let (h, b, a) = ch.scatterer(Scatterer::Target(0), 1);
        let m = compose_radar_channel(h, b, &ch.g[1], &phi, a).unwrap();
        assert!((&m - m.transpose()).iter().all(|z| z.norm() < 1e-18));
        let sv = m.singular_values();
        assert!(sv[1] <= 1e-10 * sv[0]);
    }

    #[test]
    fn synthesis_is_deterministic_and_seed_sensitive() {
        let cfg = tiny_cfg();
        let a = ChannelSet::synthesize(&cfg, 11).unwrap();
        let b = ChannelSet::synthesize(&cfg, 11).unwrap();
        let c = ChannelSet::synthesize(&cfg, 12).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.g, c.g);
        assert_ne!(a.h_dir, c.h_dir);
        assert_eq!(a.to_text(), b.to_text());
    }

    #[test]
    fn text_dump_round_trips() {
        let ch = ChannelSet::synthesize(&tiny_cfg(), 2).unwrap();
        let parsed = ChannelSet::parse_text_matrices(&ch.to_text()).unwrap();
        assert_eq!(parsed[0].0, "h_dir u=0 k=0");
        assert_eq!(parsed[0].1, ch.h_dir[0][0]);
        let g0 = parsed.iter().find(|(n, _)| n == "g k=0").unwrap();
        assert_eq!(g0.1, ch.g[0]);
    }

    #[test]
    fn without_ris_zeroes_every_ris_term() {
        let ch = ChannelSet::synthesize(&tiny_cfg(), 3).unwrap().without_ris();
        let phi = CVec::from_element(4, C64::new(1.0, 0.0));
        assert_eq!(ch.comm_channel(0, 0, &phi), ch.h_dir[0][0]);
        assert_eq!(ch.radar_path(Scatterer::Target(1), 2, &phi), ch.h_target[1][2]);
    }

    #[test]
    fn rician_power_split_matches_factor() {
        // LoS/NLoS energy ratio averaged over many seeds approaches Υ·(L / L).
        let mut cfg = tiny_cfg();
        cfg.channel.rician_direct = 4.0;
        let mut los = 0.0;
        let mut nlos = 0.0;
        for seed in 0..400 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let full = build_comm_direct(&cfg, &mut rng).unwrap();
            let mut c0 = cfg.clone();
            c0.channel.nlos_direct = 0;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let los_only = build_comm_direct(&c0, &mut rng).unwrap();
            los += fro_sqr(&los_only[0][0]);
            nlos += fro_sqr(&(&full[0][0] - &los_only[0][0]));
        }
        let ratio = los / nlos;
        assert!((ratio - 4.0).abs() < 0.6, "ratio {ratio}");
    }
}
