use tournament_eh::density::rational;
use tournament_eh::*;

fn star5() -> Tournament {
    build_galaxy(&GalaxySpec::parse("C0\nS\nL0\nS\nL0\n").unwrap()).unwrap()
}

#[test]
fn dichotomy_on_both_sides() {
    let h = star5();
    let free = gen_h_free(150, &h, 6, 2).unwrap();
    match find_transitive::<f64>(&free, &h, &FindConfig::default()).unwrap().outcome {
        Outcome::Witness(w) => assert!(w.verify(&free) && w.size() >= 8),
        Outcome::Embedding(_) => panic!("copy in an H-free host"),
    }
    let parts: Vec<Tournament> = (0..5).map(|i| gen_random(20, i)).collect();
    let (planted, _) = substitute(&h, &parts).unwrap();
    match find_transitive::<f64>(&planted, &h, &FindConfig::default()).unwrap().outcome {
        Outcome::Embedding(e) => assert!(e.verify(&planted, &h)),
        Outcome::Witness(_) => panic!("missed a planted copy"),
    }
}

#[test]
fn pipeline_branch_in_single_precision() {
    let h = Tournament::build(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
    let t = gen_transitive(1000);
    let params: PipelineParams32 = params_for(&h, 3)
        .unwrap()
        .with_linearity(rational(1, 10))
        .with_lambda(rational(1, 4))
        .with_constants(rational(1, 4), rational(1, 2))
        .with_epsilon(0.1);
    let cfg = FindConfig::<f32> {
        threshold: Some(30),
        params: Some(params),
        ..FindConfig::default()
    };
    let res = find_transitive(&t, &h, &cfg).unwrap();
    let stages: Vec<&str> = res.trace.stages().collect();
    assert!(stages.contains(&"mseq") && stages.contains(&"embed"));
    match res.outcome {
        Outcome::Witness(w) => assert!(w.verify(&t) && w.size() > 30),
        Outcome::Embedding(_) => panic!("no cycle in a transitive host"),
    }
}

#[test]
fn coloring_is_a_partition() {
    let h = star5();
    let t = gen_h_free(200, &h, 6, 12).unwrap();
    let c: Coloring64 = color_tournament(&t, &h, &FindConfig::default()).unwrap();
    assert!(c.verify(&t));
    assert!(c.within_bound());
    assert!(c.len() < 200);
}
