use tournament_eh::bounds::{certify_upper, iterate_substitution, UpperCertificate};
use tournament_eh::transitive::max_transitive_within;
use tournament_eh::*;

fn c3() -> Tournament {
    Tournament::build(3, &[(0, 1), (1, 2), (2, 0)]).unwrap()
}

fn star5() -> Tournament {
    build_galaxy(&GalaxySpec::parse("C0\nS\nL0\nS\nL0\n").unwrap()).unwrap()
}

/// Whether some three vertices form a cyclic triangle.
fn has_cyclic_triangle(t: &Tournament) -> bool {
    let n = t.n();
    (0..n).any(|a| {
        (0..n).any(|b| (0..n).any(|c| t.beats(a, b) && t.beats(b, c) && t.beats(c, a)))
    })
}

#[test]
fn c3_free_tournaments_are_transitive() {
    for n in 1..=6usize {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        for code in 0u32..1 << pairs.len() {
            let t = Tournament::from_fn(n, |i, j| {
                code >> pairs.iter().position(|&p| p == (i, j)).unwrap() & 1 == 1
            });
            let free = !has_cyclic_triangle(&t);
            assert_eq!(free, max_transitive_within(&t, &Bits::full(n)).len() == n);
            assert_eq!(free, is_h_far(&t, &c3()).unwrap());
        }
    }
}

#[test]
fn c3_certificates_are_degenerate() {
    for seed in 0..10 {
        if let Some(cert) = certify_upper::<f64>(&c3(), &CertifyConfig::new(8, 10, seed)).unwrap() {
            assert!(cert.is_degenerate());
            assert_eq!(cert.eps_upper, 1.0);
        }
    }
}

#[test]
fn small_bases_need_no_deletions() {
    // every quotient of a prime 5-vertex pattern has 5 vertices
    for n in 1..5 {
        let cert: UpperCertificate = certify_upper(&star5(), &CertifyConfig::new(n, 1, 9)).unwrap().unwrap();
        assert!(cert.deleted.is_empty());
        assert_eq!(cert.base, gen_random(n, 9));
    }
}

#[test]
fn c5_certificate_is_sound() {
    let cfg = CertifyConfig {
        delete_budget: Some(30),
        ..CertifyConfig::new(30, 50, 3)
    };
    let cert: UpperCertificate = certify_upper(&gen_c5(), &cfg).unwrap().expect("certificate");
    assert!(cert.verified_h_far);
    assert!(cert.recheck(&gen_c5()).unwrap());
    let expect = (cert.tr as f64).ln() / (cert.base.n() as f64).ln();
    assert_eq!(cert.eps_upper, expect);
    // the family built on it stays C5-free
    let t = iterate_substitution(&cert.base, 2).unwrap();
    assert!(find_embedding(&t, &gen_c5()).is_none());
}

#[test]
fn default_budget_can_run_out() {
    let cert = certify_upper::<f64>(&gen_c5(), &CertifyConfig::new(30, 5, 3)).unwrap();
    assert!(cert.is_none());
}

#[test]
fn report_for_a_composed_pattern() {
    let parts = vec![c3(), gen_transitive(1), gen_transitive(2), gen_transitive(1), gen_transitive(1)];
    let (t, _) = substitute(&star5(), &parts).unwrap();
    let rec: BoundRecord64 = bound_report(&t, &ReportConfig::default()).unwrap();
    let (lower, source) = rec.lower.unwrap();
    assert_eq!(source, LowerSource::Composition);
    // star quotient first, then the 3-cycle (itself a star, k = 5) and the
    // transitive pair (k = 7)
    let s: f64 = lower_bound_formula(5, LowerFamily::Star, 1.0).unwrap();
    let c3_eps: f64 = lower_bound_formula(3, LowerFamily::Star, 1.0).unwrap();
    let step = compose_lower_bound(c3_eps, s, 5).unwrap();
    let expect = compose_lower_bound(1.0, step, 7).unwrap();
    assert!((lower - expect).abs() < 1e-15);
    assert_eq!(rec.upper.unwrap().1, UpperSource::PartitionFormula);
}

#[test]
fn report_with_certificate() {
    let cfg = ReportConfig {
        c: 1.0,
        certify: Some(CertifyConfig::new(4, 1, 0)),
    };
    let rec: BoundRecord64 = bound_report(&star5(), &cfg).unwrap();
    let cert = rec.certificate.as_ref().unwrap();
    assert!(cert.verified_h_far);
    // a 4-vertex base has tr >= 3, so the certificate does not beat ln 5 / 5
    assert_eq!(rec.upper.unwrap().1, UpperSource::PrimeFormula);
    let f32rec: BoundRecord32 = bound_report(&star5(), &ReportConfig::default()).unwrap();
    assert!((f32rec.lower.unwrap().0 as f64 - rec.lower.unwrap().0).abs() < 1e-6);
}
