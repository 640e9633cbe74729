use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stabcert::io::read_stab;
use stabcert::sim::{build_report, tableau_run_protocol, VerifyMode, VerifyOptions};
use stabcert::witness::{post_measurement_stabilizers, synthesize_protocol, witness_map};
use stabcert::Error;
use std::path::Path;

#[test]
fn toric_code_on_the_tableau_path() {
    let g = read_stab(&Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/toric3.stab")).unwrap();
    assert_eq!((g.n_qubits(), g.k(), g.removed().len()), (18, 16, 2));
    assert!(g.is_gme().unwrap().gme);

    let map = witness_map(&g).unwrap();
    assert!(map.values().all(Option::is_some));

    let mut rng = ChaCha8Rng::seed_from_u64(18);
    for pair in [(1, 2), (1, 18), (5, 14), (9, 10)] {
        let p = synthesize_protocol(map[&pair].as_ref().unwrap()).unwrap();
        for _ in 0..32 {
            let o = p.outcomes_for_branch(rng.random_range(0..1u64 << p.measured.len()));
            match tableau_run_protocol(&g, &p, &o) {
                Ok(got) => assert_eq!(got, post_measurement_stabilizers(&p, &o).unwrap()),
                Err(e) => assert!(matches!(e, Error::Contradiction { .. }), "{e}"),
            }
        }
    }

    let dense = VerifyOptions { mode: VerifyMode::Dense, ..VerifyOptions::default() };
    assert!(matches!(build_report(&g, &dense), Err(Error::Capacity { .. })));
}
