mod common;

use std::sync::Arc;

use proptest::prelude::*;

use common::numeric::{self, C};
use common::*;
use qc_core::castles::{dungeon_castle, high_castle, kakutani_rokhlin, Castle};
use qc_core::cocycle::{remove_qc, verify_qc_certificate, Cocycle};
use qc_core::io::{
    castle_from_file, castle_to_file, cocycle_from_json, cocycle_to_json, dump_set, load_set, parse_cocycle,
    parse_sft, write_sft, CastleFile,
};
use qc_core::matperturb::{Field, Mat};
use qc_core::shiftspace::{periodic_orbits, ClopenSet, EventuallyPeriodicPoint, Sft};
use qc_core::Error;

fn through_json(c: &Castle) -> Castle {
    let text = serde_json::to_string_pretty(&castle_to_file(c)).unwrap();
    let file: CastleFile = serde_json::from_str(&text).unwrap();
    castle_from_file(c.space(), &file).unwrap()
}

fn same_castle(a: &Castle, b: &Castle) {
    assert_eq!(a.towers.len(), b.towers.len());
    for (s, t) in a.towers.iter().zip(&b.towers) {
        assert_eq!(s.height, t.height);
        assert_eq!(s.orbit, t.orbit);
        assert!(s.base.equals(&t.base).unwrap());
    }
    assert_eq!(a.verify().unwrap(), b.verify().unwrap());
}

#[test]
fn castles_survive_a_file_round_trip() {
    let g = golden();
    same_castle(
        &kakutani_rokhlin(&ClopenSet::cylinder(&g, &[0], 0).unwrap()).unwrap(),
        &through_json(&kakutani_rokhlin(&ClopenSet::cylinder(&g, &[0], 0).unwrap()).unwrap()),
    );
    let d = dungeon_castle(&g, 3, 2).unwrap();
    same_castle(&d, &through_json(&d));
    let h = high_castle(&no_short_period_sft(), 3).unwrap();
    same_castle(&h, &through_json(&h));
}

#[test]
fn certificates_agree_after_reloading() {
    let g = golden();
    let f = Cocycle::constant(&g, Mat::identity(Field::Complex, 2)).unwrap();
    let out = remove_qc(&f, 1.5, 0.5).unwrap();
    let castle = through_json(&out.castle);
    let g2 = cocycle_from_json(&g, &cocycle_to_json(&out.perturbed)).unwrap();
    let again = verify_qc_certificate(&g2, &castle, 1.5, 0.5, Some(&f)).unwrap();
    assert!(again.pass);
    assert_eq!(
        serde_json::to_value(&again).unwrap(),
        serde_json::to_value(&out.certificate).unwrap()
    );
}

#[test]
fn castles_are_tied_to_their_alphabet() {
    let g = golden();
    let c = kakutani_rokhlin(&ClopenSet::cylinder(&g, &[0], 0).unwrap()).unwrap();
    let f = Arc::new(Sft::full_shift(3));
    assert!(matches!(castle_from_file(&f, &castle_to_file(&c)), Err(Error::SpaceMismatch)));
}

#[test]
fn text_cocycle_with_a_default_entry() {
    let g = golden();
    let text = "\
# rotation by a quarter turn on 1
field real
dim 2
depth 0
format words
0 : [[2, 0], [0, 1]]
* : [[0, -1], [1, 0]]
";
    let f = parse_cocycle(&g, text).unwrap();
    let x = EventuallyPeriodicPoint::periodic(&[0, 1]);
    // B A with A = diag(2, 1) and B the quarter turn
    let p = f.product(&x, 2).unwrap();
    let want = [[0.0, -1.0], [2.0, 0.0]];
    for (i, row) in want.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            assert!((p.get(i, j) - C::new(*v, 0.0)).norm() < 1e-15);
        }
    }
}

#[test]
fn text_cocycle_errors_carry_positions() {
    let g = golden();
    match parse_cocycle(&g, "field real\ndim 2\ndepth 0\nformat words\n2 : [[1, 0], [0, 1]]\n") {
        Err(Error::InvalidSymbol(s)) => assert_eq!(s, "2"),
        Err(Error::Parse { line, .. }) => assert_eq!(line, 5),
        other => panic!("{other:?}"),
    }
    match parse_cocycle(&g, "field real\ndim 2\ndepth 0\nformat words\n0 : [[1, 0]]\n* : [[1, 0], [0, 1]]\n") {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 5),
        other => panic!("{other:?}"),
    }
}

#[test]
fn sft_errors_carry_positions() {
    match parse_sft("alphabet 0 1\nforbid 11\n0 -> 1\n") {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
        other => panic!("{other:?}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sft_files_round_trip(seed in any::<u64>()) {
        let s = random_forbidden_sft(&mut rng(seed));
        let back = parse_sft(&write_sft(&s)).unwrap();
        prop_assert_eq!(&back, &*s);
        let n = 5;
        prop_assert_eq!(periodic_orbits(&Arc::new(back), n).len(), periodic_orbits(&s, n).len());
    }

    #[test]
    fn set_dumps_round_trip(seed in any::<u64>(), limit in prop::sample::select(vec![0usize, 4, 256])) {
        let mut r = rng(seed);
        let s = random_forbidden_sft(&mut r);
        let set = random_expr(&mut r, &s, 5, -2, 2).build(&s);
        let dump = dump_set(&set, limit);
        let text = serde_json::to_string(&dump).unwrap();
        let back = load_set(&s, &serde_json::from_str(&text).unwrap()).unwrap();
        prop_assert!(back.equals(&set).unwrap());
    }

    #[test]
    fn cocycle_json_round_trips(seed in any::<u64>(), complex in any::<bool>(), depth in 0usize..=1) {
        let mut r = rng(seed);
        let g = golden();
        let field = if complex { Field::Complex } else { Field::Real };
        let entries: Vec<_> = g
            .words(2 * depth + 1)
            .into_iter()
            .map(|w| (w, numeric::well_conditioned(&mut r, field, 2)))
            .collect();
        let f = Cocycle::from_words(&g, field, 2, depth, entries).unwrap();
        let text = serde_json::to_string(&cocycle_to_json(&f)).unwrap();
        let back = parse_cocycle(&g, &text).unwrap();
        prop_assert_eq!(back.field(), field);
        for w in [&[0][..], &[0, 1], &[0, 0, 1]] {
            let x = EventuallyPeriodicPoint::periodic(w);
            let a = f.product(&x, 5).unwrap();
            let b = back.product(&x, 5).unwrap();
            prop_assert!(numeric::op_norm(&(a.matrix() - b.matrix())) == 0.0);
        }
    }
}
