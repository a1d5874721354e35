use proptest::prelude::*;
use stackmc::distributions::{basis_expectation, Basis, DistributionSpec, Marginal};
use stackmc::quadrature::{integrate, tanh_sinh};

fn rel_close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}

/// E[basis] by quadrature of basis · pdf over the support.
fn quadrature_expectation(m: &Marginal, basis: Basis) -> f64 {
    match *m {
        Marginal::Uniform { lo, hi } => {
            integrate(|x| basis.eval(x) * m.pdf(x), lo, hi, 1e-15, 1e-14).value
        }
        Marginal::Gaussian { mu, sigma } => {
            let (a, b) = (mu - 40.0 * sigma, mu + 40.0 * sigma);
            integrate(|x| basis.eval(x) * m.pdf(x), a, b, 1e-15, 1e-14).value
        }
        Marginal::Beta { a, b } => {
            // Normalised by quadrature of the unnormalised density.
            let num = beta_kernel_integral(a, b, |x| basis.eval(x));
            let den = beta_kernel_integral(a, b, |_| 1.0);
            num / den
        }
    }
}

/// ∫₀¹ g(x) x^{a-1} (1-x)^{b-1} dx, with the upper half reflected so both
/// endpoint singularities are evaluated at small arguments.
fn beta_kernel_integral<G: Fn(f64) -> f64>(a: f64, b: f64, g: G) -> f64 {
    let lower = tanh_sinh(|x| g(x) * x.powf(a - 1.0) * (1.0 - x).powf(b - 1.0), 0.0, 0.5, 1e-15).value;
    let upper = tanh_sinh(|u| g(1.0 - u) * (1.0 - u).powf(a - 1.0) * u.powf(b - 1.0), 0.0, 0.5, 1e-15).value;
    lower + upper
}

fn supported_pairs() -> Vec<(Marginal, Basis)> {
    let marginals = [
        Marginal::uniform(-1.0, 1.0).unwrap(),
        Marginal::uniform(-3.0, 3.0).unwrap(),
        Marginal::uniform(0.5, 2.0).unwrap(),
        Marginal::gaussian(0.0, 2.0).unwrap(),
        Marginal::gaussian(-0.7, 0.3).unwrap(),
        Marginal::beta(2.0, 5.0).unwrap(),
        Marginal::beta(0.5, 0.5).unwrap(),
    ];
    let mut pairs = Vec::new();
    for m in marginals {
        for n in 0..=8 {
            pairs.push((m, Basis::Monomial(n)));
        }
        if let Marginal::Uniform { .. } = m {
            for k in 0..=3 {
                pairs.push((m, Basis::Cos(k)));
                pairs.push((m, Basis::Sin(k)));
            }
        }
    }
    pairs
}

#[test]
fn closed_forms_match_quadrature() {
    for (m, basis) in supported_pairs() {
        let exact = basis_expectation(&m, basis, 8).unwrap();
        let quad = quadrature_expectation(&m, basis);
        let ok = if exact.abs() < 1e-12 { quad.abs() < 1e-12 } else { rel_close(exact, quad, 1e-10) };
        assert!(ok, "{basis} under {m}: closed {exact:e} vs quadrature {quad:e}");
    }
}

#[test]
fn cosine_on_symmetric_uniform() {
    let m = Marginal::uniform(-3.0, 3.0).unwrap();
    let quad = quadrature_expectation(&m, Basis::Cos(1));
    assert!((quad - 3f64.sin() / 3.0).abs() < 1e-14);
    assert!((m.basis_expectation(Basis::Cos(1)).unwrap() - quad).abs() < 1e-14);
}

#[test]
fn beta_second_moment_by_quadrature() {
    let m = Marginal::beta(2.0, 2.0).unwrap();
    assert!((quadrature_expectation(&m, Basis::Monomial(2)) - 0.3).abs() < 1e-13);
}

#[test]
fn densities_integrate_to_one() {
    for m in [
        Marginal::uniform(-2.0, 5.0).unwrap(),
        Marginal::gaussian(1.0, 0.5).unwrap(),
        Marginal::beta(2.0, 5.0).unwrap(),
        Marginal::beta(0.5, 3.0).unwrap(),
    ] {
        let total = match m {
            Marginal::Beta { a, b } => {
                beta_kernel_integral(a, b, |_| 1.0) * (-statrs::function::beta::ln_beta(a, b)).exp()
            }
            Marginal::Gaussian { mu, sigma } => {
                integrate(|x| m.pdf(x), mu - 40.0 * sigma, mu + 40.0 * sigma, 1e-14, 1e-14).value
            }
            Marginal::Uniform { lo, hi } => integrate(|x| m.pdf(x), lo, hi, 1e-14, 1e-14).value,
        };
        assert!((total - 1.0).abs() < 1e-10, "{m}: {total}");
    }
}

#[test]
fn sample_means_converge_to_closed_forms() {
    let n = 1_000_000;
    let dist: DistributionSpec = "uniform(-3,3)*gauss(0.5,2)*beta(2,5)".parse().unwrap();
    let samples = dist.sample(n, 2024).unwrap();
    for (d, m) in dist.marginals().iter().enumerate() {
        let mut bases = vec![Basis::Monomial(1), Basis::Monomial(2), Basis::Monomial(3)];
        if let Marginal::Uniform { .. } = m {
            bases.extend([Basis::Cos(2), Basis::Sin(1)]);
        }
        for basis in bases {
            let vals: Vec<f64> = samples.rows().map(|r| basis.eval(r[d])).collect();
            let mean = vals.iter().sum::<f64>() / n as f64;
            let sd = (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
            let exact = m.basis_expectation(basis).unwrap();
            assert!((mean - exact).abs() < 5.0 * sd / (n as f64).sqrt(), "{basis} under {m}: {mean} vs {exact}");
        }
    }
}

#[test]
fn samples_lie_in_support() {
    let dist: DistributionSpec = "uniform(-1,2)^2*beta(0.5,0.5)^2".parse().unwrap();
    let s = dist.sample(10_000, 8).unwrap();
    assert!(s.rows().all(|r| dist.contains(r)));
}

fn marginal_strategy() -> impl Strategy<Value = Marginal> {
    prop_oneof![
        (-50.0f64..50.0, 0.01f64..20.0).prop_map(|(lo, w)| Marginal::uniform(lo, lo + w).unwrap()),
        (-50.0f64..50.0, 0.01f64..20.0).prop_map(|(mu, s)| Marginal::gaussian(mu, s).unwrap()),
        (0.05f64..20.0, 0.05f64..20.0).prop_map(|(a, b)| Marginal::beta(a, b).unwrap()),
    ]
}

proptest! {
    #[test]
    fn text_form_round_trips(ms in prop::collection::vec((marginal_strategy(), 1usize..4), 1..5)) {
        let marginals: Vec<Marginal> = ms.iter().flat_map(|(m, c)| std::iter::repeat_n(*m, *c)).collect();
        let dist = DistributionSpec::new(marginals).unwrap();
        let text = dist.to_string();
        let back: DistributionSpec = text.parse().unwrap();
        prop_assert_eq!(&back, &dist);
        prop_assert_eq!(back.to_string(), text);
    }

    #[test]
    fn pdf_nonnegative_and_zero_outside(m in marginal_strategy(), x in -200.0f64..200.0) {
        let p = m.pdf(x);
        prop_assert!(p >= 0.0);
        if !m.contains(x) {
            prop_assert_eq!(p, 0.0);
        }
    }

    #[test]
    fn sampling_reproducible(m in marginal_strategy(), seed in any::<u64>()) {
        let dist = DistributionSpec::iid(m, 3).unwrap();
        prop_assert_eq!(dist.sample(16, seed).unwrap(), dist.sample(16, seed).unwrap());
    }
}
