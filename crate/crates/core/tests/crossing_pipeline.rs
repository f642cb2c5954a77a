use nonstoq::crossing::{find_crossings, remap, sweep_exact, sweep_standard, Grid, SelectionMethod};
use nonstoq::oracle::spin_symmetric_exact;
use nonstoq::{ClassicalIsing, FluctuationSpec, MCParams};

fn ferromagnet() -> ClassicalIsing {
    ClassicalIsing::infinite_range(8, 0.1, 0.5).unwrap()
}

#[test]
fn exact_curve_is_monotone() {
    let table = sweep_exact(&ferromagnet(), &"0:4:0.05".parse().unwrap(), 10.0).unwrap();
    assert_eq!(table.rows.len(), 81);
    for w in table.rows.windows(2) {
        assert!(w[1].record.m_x.value >= w[0].record.m_x.value);
    }
}

#[test]
fn sampled_curve_is_monotone_within_errors() {
    let grid = Grid::new(0.0, 3.0, 0.5).unwrap();
    let table = sweep_standard(&ferromagnet(), &grid, &MCParams::new(10.0, 32, 1000, 5000, 9)).unwrap();
    for w in table.rows.windows(2) {
        let (a, b) = (w[0].record.m_x, w[1].record.m_x);
        assert!(b.value >= a.value - 3.0 * (a.error.powi(2) + b.error.powi(2)).sqrt(), "{a:?} -> {b:?}");
    }
}

#[test]
fn free_energy_picks_the_stable_branch() {
    // γ = −1.5 makes the line mₓ = Γ̃/1.5 cut the curve at Γ̃ = 0 and again
    // near saturation; the exact model sits on the high-mₓ branch
    let f = FluctuationSpec::linear_quadratic(0.0, -1.5);
    let table = sweep_exact(&ferromagnet(), &"0:4:0.05".parse().unwrap(), 10.0).unwrap();
    let result = find_crossings(&table, &f).unwrap();
    assert_eq!(result.crossings.len(), 2);
    assert_eq!(result.crossings[0].gamma_tilde, 0.0);
    assert_eq!(result.selection_method, SelectionMethod::FreeEnergy);
    assert_eq!(result.selected_index, Some(1));
    let phi: Vec<f64> = result.crossings.iter().map(|c| c.free_energy.unwrap()).collect();
    assert!(phi[1] < phi[0]);

    let exact = spin_symmetric_exact(0.1, 0.5, &f, 10.0, 8).unwrap();
    let chosen = remap(&result, &f).unwrap();
    let other = &result.crossings[0];
    let other_energy = other.record.energy_per_spin.value + other.gamma_tilde * other.m_x - f.eval(other.m_x);
    assert!((chosen.energy_per_spin.value - exact.energy_per_spin).abs() < (other_energy - exact.energy_per_spin).abs());
    assert!(
        (chosen.m_z_abs.value - exact.m_z_abs).abs() < (other.record.m_z_abs.value - exact.m_z_abs).abs(),
        "{} vs {}",
        chosen.m_z_abs.value,
        exact.m_z_abs
    );
}

#[test]
fn weak_xx_has_a_single_crossing() {
    let table = sweep_exact(&ferromagnet(), &"0:4:0.05".parse().unwrap(), 10.0).unwrap();
    let result = find_crossings(&table, &FluctuationSpec::linear_quadratic(0.0, -0.5)).unwrap();
    assert_eq!(result.crossings.len(), 1);
    assert_eq!(result.selection_method, SelectionMethod::OnlyCrossing);
}

#[test]
fn grid_refinement_is_stable() {
    let f = FluctuationSpec::linear_quadratic(1.0, 1.0);
    let coarse = sweep_exact(&ferromagnet(), &"0:4:0.1".parse().unwrap(), 10.0).unwrap();
    let fine = sweep_exact(&ferromagnet(), &"0:4:0.05".parse().unwrap(), 10.0).unwrap();
    let a = find_crossings(&coarse, &f).unwrap();
    let b = find_crossings(&fine, &f).unwrap();
    assert_eq!(a.crossings.len(), b.crossings.len());
    for (x, y) in a.crossings.iter().zip(&b.crossings) {
        assert!((x.gamma_tilde - y.gamma_tilde).abs() < 0.1);
        // the crossing satisfies mₓ = f′⁻¹(Γ̃) on the interpolated curve
        assert!((y.m_x - f.inverse_derivative(y.gamma_tilde).unwrap()).abs() < 1e-12);
    }
}

#[test]
fn polynomial_matches_equivalent_quadratic() {
    // Γm − γm²/2 written as a polynomial; points where f′⁻¹ leaves [−1, 1] are skipped
    let table = sweep_exact(&ferromagnet(), &"0:4:0.05".parse().unwrap(), 10.0).unwrap();
    let quadratic = find_crossings(&table, &FluctuationSpec::linear_quadratic(1.0, 1.0)).unwrap();
    let poly = find_crossings(&table, &FluctuationSpec::polynomial(vec![1.0, -0.5])).unwrap();
    assert_eq!(poly.crossings.len(), 1);
    assert!((poly.crossings[0].gamma_tilde - quadratic.crossings[0].gamma_tilde).abs() < 1e-8);
}

#[test]
fn remap_reduces_to_table_for_weak_xx() {
    let table = sweep_exact(&ferromagnet(), &"0:4:0.05".parse().unwrap(), 10.0).unwrap();
    let f = FluctuationSpec::linear_quadratic(1.0, 1e-9);
    let remapped = remap(&find_crossings(&table, &f).unwrap(), &f).unwrap();
    let row = &table.rows[20].record;
    assert_eq!(table.rows[20].gamma_tilde, 1.0);
    assert!((remapped.m_x.value - row.m_x.value).abs() < 1e-6);
    assert!((remapped.energy_per_spin.value - row.energy_per_spin.value).abs() < 1e-6);
}

#[test]
fn remap_of_exact_curve_approaches_oracle() {
    // the crossing construction is the static approximation; at N = 8 it is
    // within a few hundredths of the exact non-stoquastic model
    let f = FluctuationSpec::linear_quadratic(1.0, 1.0);
    let table = sweep_exact(&ferromagnet(), &"0:4:0.05".parse().unwrap(), 10.0).unwrap();
    let remapped = remap(&find_crossings(&table, &f).unwrap(), &f).unwrap();
    let exact = spin_symmetric_exact(0.1, 0.5, &f, 10.0, 8).unwrap();
    assert!((remapped.m_x.value - exact.m_x).abs() < 0.05);
    assert!((remapped.m_z_abs.value - exact.m_z_abs).abs() < 0.05);
}
