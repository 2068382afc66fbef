//! Acceptance suite: one test per shipped claim, each printing a single
//! pass line (run with `--nocapture` to see them). Counts and tolerances are
//! pinned in the assertions; agreement checks are exact with zero tolerance.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tflcheck::bisim::{self, Mode};
use tflcheck::ccs::relabel_theta;
use tflcheck::es::es_to_tsi;
use tflcheck::fixtures;
use tflcheck::folding::{fold, verify_fold, Agreement, CcsGenerator, CcsOracle};
use tflcheck::game::mcgame::{build_mc_game, solve_mc, DEFAULT_GAME_CAP};
use tflcheck::game::stirling::{build_stirling_game, degenerates_to_stirling};
use tflcheck::game::{random_playout, solve_parity, Player};
use tflcheck::gen;
use tflcheck::logic::{parse_formula, to_positive_normal_form, Formula, FragmentId};
use tflcheck::net::net_to_tsi;
use tflcheck::semantics::{lmu_denote, Analysis, Valuation};
use tflcheck::tsi::{validate_tsi, Label, Tsi};

fn ce2() -> (Tsi, Tsi) {
    (
        net_to_tsi(&fixtures::choicejoin2_net(), 100_000).unwrap(),
        net_to_tsi(&fixtures::choicejoin3_net(), 100_000).unwrap(),
    )
}

fn suite_formulas(text: &str) -> Vec<Formula> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| parse_formula(l).unwrap())
        .collect()
}

fn model_alphabet(tsi: &Tsi) -> Vec<Label> {
    let mut a: Vec<Label> = tsi.alphabet().into_iter().collect();
    if a.is_empty() {
        a.push(Label("a".into()));
    }
    a
}

#[test]
fn criterion_01_translation_fidelity() {
    // the net of two independent actions becomes a four-transition diamond
    // with two instance classes, all axioms passing
    let tsi = net_to_tsi(&fixtures::par_ab_net(), 100_000).unwrap();
    assert_eq!(tsi.n_transitions(), 4);
    let report = validate_tsi(&tsi);
    assert!(report.all_pass(), "{report:?}");
    assert_eq!(report.classes.len(), 2);
    // the event structure of a choice followed by a shared action has four
    // events (one occurrence of the suffix per causal line)
    let es = fixtures::choice_then_c_es();
    assert_eq!(es.n_events(), 4);
    assert!(es_to_tsi(&es, 100_000).is_ok());
    println!("criterion 01 translation-fidelity: PASS");
}

#[test]
fn criterion_02_twin_diamond_counterexample() {
    let joint = fixtures::twin_joint();
    let split = fixtures::twin_split();
    // hp bisimilar...
    let v = bisim::hpb(&joint, &split, Mode::ExactAcyclic).unwrap();
    assert!(v.is_equivalent(), "top pair must be hp bisimilar");
    // ...yet separated by the stored trace formula, on both engines
    let f = parse_formula(fixtures::distinguish_formula().trim()).unwrap();
    let mut verdicts = Vec::new();
    for tsi in [&joint, &split] {
        let an = Analysis::new(tsi).unwrap();
        let denot = an.satisfies_initial(&f).unwrap();
        let mc = build_mc_game(&an, an.space.initial(), &f, &Valuation::new(), DEFAULT_GAME_CAP)
            .unwrap();
        let game = solve_mc(&mc).winner == Player::Eve;
        assert_eq!(denot, game, "engines must agree");
        verdicts.push(denot);
    }
    assert_eq!(verdicts.iter().filter(|&&b| b).count(), 1, "exactly one side satisfies it");
    // bottom pair: not hp bisimilar, and no distinguishing TLMU formula to depth 4
    let v = bisim::hpb(&fixtures::diamond(), &fixtures::diamond_branch(), Mode::ExactAcyclic)
        .unwrap();
    assert!(!v.is_equivalent(), "bottom pair must not be hp bisimilar");
    let none = bisim::distinguishing_formula(
        &fixtures::diamond(),
        &fixtures::diamond_branch(),
        FragmentId::Tlmu,
        4,
    )
    .unwrap();
    assert!(none.is_none(), "bottom pair is TLMU-indistinguishable to depth 4");
    println!("criterion 02 twin-diamond counterexample: PASS");
}

#[test]
fn criterion_03_choice_join_counterexample() {
    let (a, b) = ce2();
    assert!(bisim::thpb(&a, &b, Mode::ExactAcyclic).unwrap().is_equivalent());
    assert!(!bisim::hhpb(&a, &b).unwrap().is_equivalent());
    println!("criterion 03 choice-join counterexample: PASS");
}

#[test]
fn criterion_04_game_semantics_agreement() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x04);
    let mut checked = 0;
    while checked < 200 {
        let tsi = if rng.gen_bool(0.5) {
            gen::random_lts(&mut rng, 8, 3)
        } else {
            gen::random_net_tsi(&mut rng, 8)
        };
        let alphabet = model_alphabet(&tsi);
        let opts = gen::FormulaOptions {
            max_depth: 5,
            allow_otimes: true,
            allow_causal: true,
            allow_fixpoints: true,
        };
        let f = to_positive_normal_form(&gen::random_formula(&mut rng, &alphabet, &opts));
        let an = Analysis::new(&tsi).unwrap();
        let denot = an.satisfies_initial(&f).unwrap();
        let mc = build_mc_game(&an, an.space.initial(), &f, &Valuation::new(), DEFAULT_GAME_CAP)
            .unwrap();
        let game = solve_mc(&mc).winner == Player::Eve;
        assert_eq!(denot, game, "disagreement on pair {checked}");
        checked += 1;
    }
    println!("criterion 04 game-semantics agreement ({checked} random pairs, zero tolerance): PASS");
}

#[test]
fn criterion_05_trace_modality_idempotent_not_extensive() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x05);
    let mut checked = 0;
    for _ in 0..60 {
        let tsi = if rng.gen_bool(0.5) {
            gen::random_lts(&mut rng, 7, 2)
        } else {
            gen::random_net_tsi(&mut rng, 16)
        };
        let alphabet = model_alphabet(&tsi);
        let opts = gen::FormulaOptions {
            max_depth: 3,
            allow_otimes: true,
            allow_causal: true,
            allow_fixpoints: true,
        };
        let an = Analysis::new(&tsi).unwrap();
        for _ in 0..3 {
            let f = gen::random_formula(&mut rng, &alphabet, &opts);
            let once = an.denote(&Formula::dia_co(f.clone()), &Valuation::new()).unwrap();
            let twice = an
                .denote(&Formula::dia_co(Formula::dia_co(f)), &Valuation::new())
                .unwrap();
            assert_eq!(once, twice, "idempotence must be exact");
            checked += 1;
        }
    }
    // the stored fixture witnesses non-extensiveness
    let tsi = fixtures::choice();
    let an = Analysis::new(&tsi).unwrap();
    let f = parse_formula(fixtures::nonext_formula().trim()).unwrap();
    let d = an.denote(&f, &Valuation::new()).unwrap();
    let dco = an.denote(&Formula::dia_co(f), &Valuation::new()).unwrap();
    assert!(!d.is_subset(&dco), "the fixture must witness non-extensiveness");
    println!("criterion 05 idempotence ({checked} formulas) + non-extensiveness fixture: PASS");
}

#[test]
fn criterion_06_degeneration_to_local_games() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x06);
    for i in 0..100 {
        let tsi = gen::random_lts(&mut rng, 7, 3);
        let alphabet = model_alphabet(&tsi);
        let opts = gen::FormulaOptions {
            max_depth: 4,
            allow_otimes: false,
            allow_causal: false,
            allow_fixpoints: true,
        };
        let f = to_positive_normal_form(&gen::random_formula(&mut rng, &alphabet, &opts));
        let an = Analysis::new(&tsi).unwrap();
        let mc = build_mc_game(&an, an.space.initial(), &f, &Valuation::new(), DEFAULT_GAME_CAP)
            .unwrap();
        let st = build_stirling_game(&tsi, &f, DEFAULT_GAME_CAP).unwrap();
        assert!(degenerates_to_stirling(&mc, &an, &st), "projection mismatch on model {i}");
        let higher = solve_mc(&mc).winner;
        let local = solve_parity(&st.game).winner[st.initial];
        let reference = lmu_denote(&tsi, &f, &BTreeMap::new())
            .unwrap()
            .contains(&tsi.initial());
        assert_eq!(higher == Player::Eve, reference, "evaluator mismatch on model {i}");
        assert_eq!(higher, local, "game mismatch on model {i}");
    }
    println!("criterion 06 degeneration on 100 empty-independence models: PASS");
}

#[test]
fn criterion_07_equivalence_hierarchy() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x07);
    let (ce2a, ce2b) = ce2();
    let mut pairs: Vec<(String, Tsi, Tsi)> = vec![
        ("twin joint/split".into(), fixtures::twin_joint(), fixtures::twin_split()),
        ("diamond/extra-branch".into(), fixtures::diamond(), fixtures::diamond_branch()),
        ("choice joins".into(), ce2a.clone(), ce2b.clone()),
        ("diamond/interleaving".into(), fixtures::diamond(), fixtures::interleaving()),
        ("diamond self".into(), fixtures::diamond(), fixtures::diamond()),
        ("choice-join self".into(), ce2a.clone(), ce2a.clone()),
        ("choice self".into(), fixtures::choice(), fixtures::choice()),
        ("choice/diamond".into(), fixtures::choice(), fixtures::diamond()),
    ];
    for i in 0..4 {
        let a = gen::random_xi_tsi(&mut rng, 32);
        let b = if i % 2 == 0 { gen::shuffled_copy(&mut rng, &a) } else { gen::random_xi_tsi(&mut rng, 32) };
        pairs.push((format!("random pair {i}"), a, b));
    }
    assert!(pairs.len() >= 10);
    let mut separations = (false, false);
    for (name, a, b) in &pairs {
        let sb = bisim::strong_bisim(a, b).is_equivalent();
        let hpb = bisim::hpb(a, b, Mode::ExactAcyclic).unwrap().is_equivalent();
        let thpb = bisim::thpb(a, b, Mode::ExactAcyclic).unwrap().is_equivalent();
        let hhpb = bisim::hhpb(a, b).unwrap().is_equivalent();
        // inclusions: finer equivalences imply coarser ones
        assert!(!hhpb || thpb, "{name}: hhpb without thpb");
        assert!(!thpb || hpb, "{name}: thpb without hpb");
        assert!(!hpb || sb, "{name}: hpb without sb");
        if hpb && !thpb {
            separations.0 = true;
        }
        if thpb && !hhpb {
            separations.1 = true;
        }
    }
    assert!(separations.0, "a pair must separate hpb from thpb");
    assert!(separations.1, "a pair must separate thpb from hhpb");
    println!(
        "criterion 07 hierarchy on {} acyclic pairs with both separations: PASS",
        pairs.len()
    );
}

#[test]
fn criterion_08_local_xi_agrees_with_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x08);
    let mut checked = 0;
    while checked < 50 {
        let a = gen::random_xi_tsi(&mut rng, 32);
        let b = match checked % 3 {
            0 => gen::shuffled_copy(&mut rng, &a),
            _ => gen::random_xi_tsi(&mut rng, 32),
        };
        let exact = bisim::hpb(&a, &b, Mode::ExactAcyclic).unwrap().is_equivalent();
        let local = bisim::hpb(&a, &b, Mode::LocalXi).unwrap().is_equivalent();
        assert_eq!(exact, local, "divergence on pair {checked}");
        checked += 1;
    }
    println!("criterion 08 local-xi vs exact hpb on {checked} Xi pairs: PASS");
}

#[test]
fn criterion_09_folding() {
    // the single-loop program folds to a one-state self-loop
    let gen_loop = CcsGenerator::new(relabel_theta(&fixtures::loop_ccs()).unwrap().program);
    let oracle = CcsOracle { gen: &gen_loop };
    let folded = fold(&gen_loop, &oracle, 100_000).unwrap();
    assert_eq!(folded.tsi.n_states(), 1);
    assert_eq!(folded.tsi.n_transitions(), 1);
    assert!(validate_tsi(&folded.tsi).all_pass());

    // the two-component program folds to a system strongly bisimilar to the diamond
    let gen_par = CcsGenerator::new(relabel_theta(&fixtures::par_ab_ccs()).unwrap().program);
    let oracle_par = CcsOracle { gen: &gen_par };
    let folded_par = fold(&gen_par, &oracle_par, 100_000).unwrap();
    assert!(bisim::strong_bisim(&folded_par.tsi, &fixtures::diamond()).is_equivalent());
    assert!(validate_tsi(&folded_par.tsi).all_pass());

    // a 20-formula suite at unfolding depth 12 reports no disagreement
    let formulas = suite_formulas(fixtures::suite20());
    assert_eq!(formulas.len(), 20);
    let mut undecided = 0;
    for (gen, folded_tsi) in [
        (&gen_loop, &folded.tsi),
        (&gen_par, &folded_par.tsi),
        (
            &CcsGenerator::new(relabel_theta(&fixtures::two_loops_ccs()).unwrap().program),
            &fold(
                &CcsGenerator::new(relabel_theta(&fixtures::two_loops_ccs()).unwrap().program),
                &CcsOracle {
                    gen: &CcsGenerator::new(
                        relabel_theta(&fixtures::two_loops_ccs()).unwrap().program,
                    ),
                },
                100_000,
            )
            .unwrap()
            .tsi,
        ),
    ] {
        let report = verify_fold(folded_tsi, gen, &formulas, 12, 1_000_000).unwrap();
        assert_eq!(report.len(), 20);
        for e in &report {
            assert_ne!(e.status, Agreement::Disagree, "{}", e.formula);
            if e.status == Agreement::Undecided {
                undecided += 1;
            }
        }
    }
    println!("criterion 09 folding (loop, parallel pair, two loops; {undecided} undecided, 0 disagreements): PASS");
}

#[test]
fn criterion_10_determinacy_and_strategy_validity() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x10);
    // corpus: fixture models with stored formulas plus random games
    let mut games = Vec::new();
    let fixture_models = [
        fixtures::diamond(),
        fixtures::interleaving(),
        fixtures::choice(),
        fixtures::twin_joint(),
        fixtures::twin_split(),
        fixtures::diamond_branch(),
    ];
    let fixture_formulas = [
        "<co>(<a> <c> tt & <b> <d> tt)",
        "mu Z. (<c> tt | <a> Z | <b> Z)",
        "nu Z. ([a] Z & [b] Z)",
        "[co] (<a> tt | <b> tt)",
    ];
    for tsi in &fixture_models {
        for f in &fixture_formulas {
            games.push((tsi.clone(), parse_formula(f).unwrap()));
        }
    }
    for _ in 0..6 {
        let tsi = gen::random_net_tsi(&mut rng, 12);
        let alphabet = model_alphabet(&tsi);
        let opts = gen::FormulaOptions {
            max_depth: 4,
            allow_otimes: true,
            allow_causal: true,
            allow_fixpoints: true,
        };
        let f = gen::random_formula(&mut rng, &alphabet, &opts);
        games.push((tsi, f));
    }

    let mut total_playouts = 0usize;
    for (tsi, f) in &games {
        let an = Analysis::new(tsi).unwrap();
        let mc = build_mc_game(&an, an.space.initial(), f, &Valuation::new(), DEFAULT_GAME_CAP)
            .unwrap();
        let sol = solve_mc(&mc);
        // winning regions partition the board and are closed under play
        for v in 0..mc.game.len() {
            let w = sol.solved.winner[v];
            if mc.game.owner[v] == w {
                if !mc.game.edges[v].is_empty() {
                    let t = sol.solved.strategy[v].expect("winner must have a move");
                    assert_eq!(sol.solved.winner[t], w, "strategy leaves the region");
                }
            } else {
                for &t in &mc.game.edges[v] {
                    assert_eq!(sol.solved.winner[t], w, "opponent escapes the region");
                }
            }
        }
        // 1000 adversarial playouts per strategy
        for player in [Player::Eve, Player::Adam] {
            let region: Vec<usize> =
                (0..mc.game.len()).filter(|&v| sol.solved.winner[v] == player).collect();
            if region.is_empty() {
                continue;
            }
            for _ in 0..1000 {
                let start = region[rng.gen_range(0..region.len())];
                assert!(
                    random_playout(&mc.game, &sol.solved, start, player, &mut rng),
                    "a strategy lost a playout"
                );
                total_playouts += 1;
            }
        }
    }
    println!(
        "criterion 10 determinacy + strategy validity ({} games, {total_playouts} playouts, 0 losses): PASS",
        games.len()
    );
}
