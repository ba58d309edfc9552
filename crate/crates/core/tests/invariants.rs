//! Randomized and grid checks of the structural invariants: symmetries of
//! the Hamiltonian, the drive mapping, the propagator and the analysis.

use std::f64::consts::PI;

use nalgebra::DVector;
use proptest::prelude::*;

use lmg_qudit::drive::{lmg_to_drive, Couplings, DriveOptions, LmgSchedule, RampShape, Segment, Sector};
use lmg_qudit::evolve::{self, NoiseModel, PropagatorConfig};
use lmg_qudit::linalg::{self, c, commutator, max_abs, CVector};
use lmg_qudit::lmg::{self, Basis, BasisMap, GapKind, LmgParams};
use lmg_qudit::protocols::{extract_peak, run_order_parameter, OrderParameterConfig, PeakOptions, ProtocolOptions};
use lmg_qudit::semiclassics::{critical_energy, density_of_states, dos};
use lmg_qudit::spin::{AngularMomentumSet, BasisTag, Parity, SpinSize, SpinState};

fn spin_of(j: u32) -> SpinSize {
    SpinSize::new(j).unwrap()
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

fn state(amps: &[(f64, f64)], basis: BasisTag) -> SpinState {
    let v = CVector::from_iterator(amps.len(), amps.iter().map(|&(re, im)| num_complex::Complex64::new(re, im)));
    SpinState::normalized(v, basis).unwrap()
}

fn amplitudes(d: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), d).prop_filter("nonzero", |v| v.iter().any(|(a, b)| a.abs() + b.abs() > 0.1))
}

fn spin_and_state() -> impl Strategy<Value = (u32, Vec<(f64, f64)>)> {
    (1u32..=4).prop_flat_map(|j| (Just(j), amplitudes(2 * j as usize + 1)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn hamiltonian_commutes_with_parity(j in 1u32..=12, h in -3.0..3.0f64, gx in 0.0..3.0f64, gy in 0.0..3.0f64) {
        let s = spin_of(j);
        let p = LmgParams { gamma_y: gy, ..LmgParams::new(h, gx) };
        for basis in [Basis::Jz, Basis::Transmon] {
            let hm = lmg::build_lmg(s, &p, basis);
            let par = lmg::parity_operator(s, basis);
            prop_assert!(max_abs(&commutator(&hm, &par)) <= 1e-12);
        }
    }

    #[test]
    fn field_reversal_is_a_rotation(j in 1u32..=10, h in 0.0..3.0f64, gx in 0.0..3.0f64, gy in 0.0..1.0f64) {
        // exp(-i pi J_x) maps J_z to -J_z and leaves J_x^2, J_y^2 alone
        let s = spin_of(j);
        let p = LmgParams { gamma_y: gy, ..LmgParams::new(h, gx) };
        let flipped = LmgParams { h: -h, ..p };
        let a = sorted(lmg::spectrum(s, &p, Basis::Jz).unwrap().energies);
        let b = sorted(lmg::spectrum(s, &flipped, Basis::Jz).unwrap().energies);
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-10 * (1.0 + x.abs()));
        }
        let ops = AngularMomentumSet::new(s);
        let r = ops.rotation_x(PI);
        let conj = &r * lmg::build_lmg(s, &p, Basis::Jz) * r.adjoint();
        prop_assert!(max_abs(&(conj - lmg::build_lmg(s, &flipped, Basis::Jz))) <= 1e-10 * (1.0 + j as f64).powi(2));
    }

    #[test]
    fn basis_map_is_a_permutation_similarity(j in 1u32..=10, h in 0.0..3.0f64, gx in 0.0..3.0f64, amps in amplitudes(21)) {
        let s = spin_of(j);
        let map = BasisMap::new(s);
        let p = LmgParams::new(h, gx);
        let a = sorted(linalg::eigh(&lmg::build_lmg(s, &p, Basis::Jz)).0);
        let b = sorted(linalg::eigh(&lmg::build_lmg(s, &p, Basis::Transmon)).0);
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-12 * (1.0 + x.abs()));
        }
        let v = state(&amps[..s.dim()], BasisTag::JzBasis).into_amplitudes();
        prop_assert_eq!(map.vector_to_jz(&map.vector_to_transmon(&v)), v);
    }

    #[test]
    fn drive_is_linear_in_omega(j in 1u32..=6, h0 in 0.0..2.0f64, h1 in 0.0..2.0f64, g0 in 0.0..2.0f64, g1 in 0.0..2.0f64, u in 0.0..1.0f64) {
        let s = spin_of(j);
        let ds = |omega: f64| {
            let seg = Segment::ramp(Couplings::new(h0, g0), Couplings::new(h1, g1), 300e-9, RampShape::Linear, omega);
            lmg_to_drive(s, &LmgSchedule::new(vec![seg]).unwrap(), Sector::Full, DriveOptions::default()).unwrap()
        };
        let (one, two) = (ds(1.0e6), ds(2.0e6));
        let t = 300e-9 * u;
        let (a1, a2) = (one.amplitudes(t).unwrap(), two.amplitudes(t).unwrap());
        let (d1, d2) = (one.detunings(t).unwrap(), two.detunings(t).unwrap());
        for n in 0..s.dim() {
            prop_assert_eq!(2.0 * a1[n].norm(), a2[n].norm());
            prop_assert_eq!(2.0 * d1[n].abs(), d2[n].abs());
        }
        // off-diagonals of the rotating Hamiltonian are the drive amplitudes
        let hr = two.rotating_hamiltonian(t).unwrap();
        for n in 1..s.dim() {
            prop_assert!((hr[(n - 1, n)] - a2[n]).norm() <= 1e-12 * a2[n].norm().max(1.0));
        }
    }

    #[test]
    fn noiseless_ramps_conserve_norm_and_parity(
        (j, amps) in spin_and_state(),
        h0 in 0.0..2.0f64, h1 in 0.0..2.0f64, g1 in 0.2..1.5f64,
        len in 50e-9..600e-9f64,
    ) {
        let s = spin_of(j);
        let segs = vec![
            Segment::ramp(Couplings::new(h0, 1.0), Couplings::new(h1, g1), len, RampShape::RaisedCosine, 1.91e6),
            Segment::hold(Couplings::new(h1, g1), 0.5 * len, 1.91e6),
        ];
        let ds = lmg_to_drive(s, &LmgSchedule::new(segs).unwrap(), Sector::Full, DriveOptions::default()).unwrap();
        let psi = state(&amps, BasisTag::JzBasis);
        let tr = evolve::propagate(&psi, &ds, &PropagatorConfig::default(), None, &evolve::uniform_times(1.5 * len, 12)).unwrap();
        for (k, pops) in tr.populations.iter().enumerate() {
            prop_assert!((pops.iter().sum::<f64>() - 1.0).abs() <= 1e-10);
            prop_assert!((tr.parity[k] - tr.parity[0]).abs() <= 1e-8);
        }
    }

    #[test]
    fn constant_schedules_conserve_energy((j, amps) in spin_and_state(), h in 0.0..2.5f64, gx in 0.0..2.0f64) {
        let s = spin_of(j);
        let p = LmgParams::new(h, gx);
        let ds = lmg_to_drive(s, &LmgSchedule::constant(p, 2e-6).unwrap(), Sector::Full, DriveOptions::default()).unwrap();
        let psi = state(&amps, BasisTag::JzBasis);
        let tr = evolve::propagate(&psi, &ds, &PropagatorConfig::default(), None, &evolve::uniform_times(2e-6, 6)).unwrap();
        let hm = lmg::build_lmg(s, &p, Basis::Transmon);
        let norm = max_abs(&hm).max(1.0);
        let evolve::StateHistory::Pure(states) = &tr.history else { unreachable!() };
        let e = |v: &CVector| v.dotc(&(&hm * v)).re;
        for v in states {
            prop_assert!((e(v) - e(&states[0])).abs() <= 1e-8 * norm);
        }
    }

    #[test]
    fn decay_only_raises_parity(j in 1u32..=3, amps in amplitudes(3), h in 0.0..2.0f64) {
        // random superposition inside the odd block
        let s = spin_of(j);
        let map = BasisMap::new(s);
        let d = s.dim();
        let mut v = CVector::zeros(d);
        for (k, n) in (map.even_levels()..d).enumerate() {
            let (re, im) = amps[k % amps.len()];
            v[n] = num_complex::Complex64::new(re + 0.05, im);
        }
        let psi = SpinState::normalized(v, BasisTag::TransmonBasis).unwrap();
        let ds = lmg_to_drive(s, &LmgSchedule::constant(LmgParams::new(h, 1.0), 3e-6).unwrap(), Sector::Full, DriveOptions::default()).unwrap();
        let noise = NoiseModel::default_for(d);
        let tr = evolve::propagate(&psi, &ds, &PropagatorConfig::default(), Some(&noise), &evolve::uniform_times(3e-6, 10)).unwrap();
        prop_assert!((tr.parity[0] + 1.0).abs() <= 1e-10);
        for w in tr.parity.windows(2) {
            prop_assert!(w[1] >= w[0] - 1e-12);
            prop_assert!(w[1] >= -1.0 - 1e-8);
        }
    }

    #[test]
    fn peak_within_one_bin(f in 0.4e6..2.0e6f64, phase in 0.0..std::f64::consts::TAU, n in 40usize..120, offset in -1.0..1.0f64) {
        // at least three periods, as on every Ramsey grid
        let span = 8e-6;
        let ts: Vec<f64> = (0..n).map(|k| span * k as f64 / n as f64).collect();
        let sig: Vec<f64> = ts.iter().map(|t| offset + (2.0 * PI * f * t + phase).cos()).collect();
        let est = extract_peak(&sig, &ts, &PeakOptions::default()).unwrap();
        prop_assert!((est.peak_freq().unwrap() - f).abs() <= est.bin_width);
    }

    #[test]
    fn density_is_positive_in_band(h in 0.05..2.5f64, u in 0.001..0.999f64) {
        let (lo, hi) = dos::band(h);
        let e = lo + (hi - lo) * u;
        let p = density_of_states(h, e).unwrap();
        prop_assert!(p.divergent || (p.rho.is_finite() && p.rho > 0.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn order_distributions_are_normalized(j in 1u32..=6, r in 0.0..2.5f64, doubled in any::<bool>()) {
        let mut cfg = OrderParameterConfig::new(if doubled { 2 * j } else { j }, vec![r]);
        cfg.doubled = doubled;
        let d = run_order_parameter(&cfg, &ProtocolOptions::default()).unwrap();
        prop_assert!((d[0].probabilities.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
        prop_assert!(d[0].probabilities.iter().all(|p| *p >= -1e-12));
    }
}

#[test]
fn tunneling_gap_closes_with_spin_size() {
    let p = LmgParams::new(0.5, 1.0);
    let gaps: Vec<f64> = [2, 4, 8, 16].iter().map(|&j| lmg::sector_gap(spin_of(j), &p, GapKind::EvenOdd).unwrap()).collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
}

#[test]
fn even_even_gap_has_one_interior_minimum() {
    for j in [2, 3, 4] {
        let g: Vec<f64> = (0..201)
            .map(|k| lmg::sector_gap(spin_of(j), &LmgParams::new(0.01 * k as f64, 1.0), GapKind::EvenEven).unwrap())
            .collect();
        let minima = (1..200).filter(|&k| g[k] < g[k - 1] && g[k] < g[k + 1]).count();
        assert_eq!(minima, 1, "j = {j}");
    }
}

#[test]
fn states_below_the_barrier_come_in_degenerate_pairs() {
    let (j, h) = (8, 0.18);
    let s = spin_of(j);
    let p = LmgParams::new(h, 1.0);
    let even = lmg::sector_eigenvalues(s, &p, Parity::Even);
    let odd = lmg::sector_eigenvalues(s, &p, Parity::Odd);
    let e_c = j as f64 * critical_energy(h, 1.0).unwrap().shifted;
    let pairs_below = odd.iter().zip(&even).filter(|(o, e)| **o - even[0] < e_c && **e - even[0] < e_c).count();
    // "near-degenerate" on the scale of the Ramsey resolution used at this size
    let bin = 2.0 * PI / (8.0 * 40.0);
    let pairs = odd.iter().zip(&even).take_while(|(o, e)| (*o - *e).abs() < 2.0 * bin).count();
    assert_eq!(pairs_below, pairs, "{pairs_below} pairs below j E_c, {pairs} near-degenerate pairs");
    // one more even level sits just under the barrier with its odd partner
    // above it; counting even levels alone overshoots by that one
    let even_below: Vec<f64> = even.iter().map(|e| e - even[0]).filter(|e| *e < e_c).collect();
    assert_eq!(even_below.len(), pairs + 1);
    assert!(e_c - even_below[pairs] < 0.01 * e_c);
}

#[test]
fn lindblad_populations_stay_a_distribution() {
    let s = spin_of(2);
    let ds = lmg_to_drive(s, &LmgSchedule::constant(LmgParams::new(0.3, 1.0), 5e-6).unwrap(), Sector::Full, DriveOptions::default()).unwrap();
    let psi = SpinState::normalized(DVector::from_element(5, c(1.0)), BasisTag::JzBasis).unwrap();
    let tr = evolve::propagate(&psi, &ds, &PropagatorConfig::default(), Some(&NoiseModel::default_for(5)), &evolve::uniform_times(5e-6, 8)).unwrap();
    for pops in &tr.populations {
        assert!((pops.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        assert!(pops.iter().all(|p| *p > -1e-12));
    }
}
