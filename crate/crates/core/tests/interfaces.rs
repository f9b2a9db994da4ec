use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use phasevo::genome::mutate;
use phasevo::harness::{run_experiment, ExperimentConfig};
use phasevo::hyperneat::{build_substrate, QueryParams, SubstrateLayout, SubstrateNet};
use phasevo::innovation::InnovationRegistry;
use phasevo::morphology::generate_fragmented;
use phasevo::sim::simulate;
use phasevo::{CppnGenome, Dictionary, Error, MutationParams, PhaseField, Sam, SimParams};

fn tiny(text: &str) -> ExperimentConfig {
    let mut c = ExperimentConfig::from_text(
        "sim_profile = desk\nduration = 0.1\nsam_dims = 4x4x4\nsam_count = 1\n\
         runs = 2\ngenerations = 3\npopulation = 4\naptitude = false\n",
    )
    .unwrap();
    c.apply_text(text).unwrap();
    c
}

#[test]
fn genome_and_substrate_json_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut registry = InnovationRegistry::new(4, 2);
    let params = MutationParams {
        add_node: 0.7,
        ..MutationParams::default()
    };
    let mut g = CppnGenome::minimal(4, 2, Dictionary::Full, 2.0, &mut rng);
    for _ in 0..5 {
        registry.new_generation();
        g = mutate(&g, &params, Dictionary::Full, &mut registry, &mut rng);
    }
    g.fitness = Some(0.012345678901234567);
    let back = CppnGenome::from_json(&g.to_json().unwrap()).unwrap();
    assert_eq!(back.fitness, None);
    g.fitness = None;
    assert_eq!(back, g);

    let net = build_substrate(&g, &SubstrateLayout::default(), &QueryParams::default()).unwrap();
    let again = SubstrateNet::from_json(&net.to_json().unwrap()).unwrap();
    assert_eq!(again.connections, net.connections);
    assert_eq!(again.forward([0.1, 0.2, -0.3, 1.0]), net.forward([0.1, 0.2, -0.3, 1.0]));
}

#[test]
fn sam_file_and_trace_csv() {
    let dir = tempfile::tempdir().unwrap();
    let sam = generate_fragmented([5, 4, 4], 3).unwrap();
    let path = dir.path().join("a.sam");
    sam.save(&path).unwrap();
    assert_eq!(Sam::load(&path).unwrap(), sam);
    assert!(matches!(Sam::load(&dir.path().join("missing")), Err(Error::Io { .. })));

    let params = SimParams {
        duration: 0.05,
        ..SimParams::desk()
    };
    let trace = simulate(&sam, &PhaseField::uniform(&sam, 0.5), &params).unwrap();
    let mut buf = Vec::new();
    trace.write_csv(&mut buf, &params).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let header = format!("# voxel_count={} config_hash={}", sam.voxel_count(), params.config_hash());
    assert_eq!(text.lines().next(), Some(header.as_str()));
    assert_eq!(text.lines().count(), trace.samples.len() + 2);
}

#[test]
fn experiment_writes_expected_files() {
    let dir = tempfile::tempdir().unwrap();
    for alg in ["neat", "hyperneat", "sga"] {
        let out = dir.path().join(alg);
        let summary = run_experiment(&tiny(&format!("algorithm = {alg}\n")), &out).unwrap();
        assert_eq!(summary.runs.len(), 2);
        for f in ["config.txt", "run_00.csv", "run_01.csv", "runs.csv", "metrics.csv", "fitness.svg"] {
            assert!(out.join(f).exists(), "{alg}: missing {f}");
        }
        let metrics = std::fs::read_to_string(out.join("metrics.csv")).unwrap();
        assert_eq!(metrics.lines().count(), 4);
        for r in &summary.runs {
            assert!(r.final_best >= 0.0);
        }
    }
    assert!(dir.path().join("neat/champion_00.json").exists());
    assert!(dir.path().join("hyperneat/substrate_00.json").exists());
    assert!(dir.path().join("sga/champion_00.csv").exists());
}

#[test]
fn experiments_are_reproducible_for_any_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let c = dir.path().join("c");
    run_experiment(&tiny("algorithm = hyperneat\n"), &a).unwrap();
    run_experiment(&tiny("algorithm = hyperneat\n"), &b).unwrap();
    run_experiment(&tiny("algorithm = hyperneat\nworkers = 3\n"), &c).unwrap();
    for f in ["metrics.csv", "runs.csv", "run_00.csv", "run_01.csv"] {
        let reference = std::fs::read(a.join(f)).unwrap();
        assert_eq!(std::fs::read(b.join(f)).unwrap(), reference, "{f}");
        assert_eq!(std::fs::read(c.join(f)).unwrap(), reference, "{f}");
    }
}

#[test]
fn unwritable_output_fails_before_running() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let err = run_experiment(&tiny("generations = 500\n"), &blocker.join("out")).unwrap_err();
    assert!(matches!(err, Error::Io { .. }), "{err}");
}

#[test]
fn config_text_round_trips() {
    let c = tiny("algorithm = sga\nhidden_layers = 5,4,3\ndt = 1e-6\n");
    let back = ExperimentConfig::from_text(&c.to_text()).unwrap();
    assert_eq!(back.to_text(), c.to_text());
    assert!(matches!(
        ExperimentConfig::from_text("runs = 2\nbogus\n"),
        Err(Error::Parse { line: 2, .. })
    ));
}
