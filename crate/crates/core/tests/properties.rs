use biomol_core::metrics::{
    blosum_substitution, identity, levenshtein, sw_alignment, tanimoto, SubstitutionMatrix,
};
use biomol_core::molgraph::{
    canonical_form, check_valence, decode_selfies, parse_smiles, SelfiesString,
};
use biomol_core::motif::{motif_prompt, protein_motif_vector, MotifDictionary, MotifVector};
use biomol_core::pipeline::build_plan;
use biomol_core::protseq::{ProteinSequence, AMINO_ACIDS};
use biomol_core::vocab::selfies_alphabet;
use ndarray::Array2;
use proptest::prelude::*;

fn protein() -> impl Strategy<Value = ProteinSequence> {
    prop::collection::vec(prop::sample::select(AMINO_ACIDS.to_vec()), 1..40)
        .prop_map(|v| ProteinSequence::new(String::from_utf8(v).unwrap()).unwrap())
}

fn bits(len: usize) -> impl Strategy<Value = MotifVector> {
    prop::collection::vec(any::<bool>(), len).prop_map(MotifVector::from_bits)
}

proptest! {
    #[test]
    fn tanimoto_is_symmetric_and_bounded((a, b) in (1usize..200).prop_flat_map(|n| (bits(n), bits(n)))) {
        let ab = tanimoto(&a, &b).unwrap();
        prop_assert_eq!(ab, tanimoto(&b, &a).unwrap());
        prop_assert!((0.0..=1.0).contains(&ab));
        prop_assert_eq!(tanimoto(&a, &a).unwrap(), 1.0);
    }

    #[test]
    fn levenshtein_is_a_metric(a in "[abc]{0,12}", b in "[abc]{0,12}", c in "[abc]{0,12}") {
        let ab = levenshtein(&a, &b);
        prop_assert_eq!(ab, levenshtein(&b, &a));
        prop_assert_eq!(levenshtein(&a, &a), 0);
        prop_assert!(levenshtein(&a, &c) <= ab + levenshtein(&b, &c));
        prop_assert!(ab <= a.len().max(b.len()));
    }

    #[test]
    fn protein_scores_are_symmetric_and_bounded(a in protein(), b in protein()) {
        let id = identity(&a, &b);
        prop_assert_eq!(id, identity(&b, &a));
        prop_assert!((0.0..=100.0).contains(&id));
        let al = sw_alignment(&a, &b);
        prop_assert!((0.0..=100.0).contains(&al));
        prop_assert_eq!(identity(&a, &a), 100.0);
        prop_assert_eq!(sw_alignment(&a, &a), 100.0);
        let m = SubstitutionMatrix::blosum45();
        prop_assert_eq!(blosum_substitution(&a, &b, &m), blosum_substitution(&b, &a, &m));
    }

    #[test]
    fn motif_prompt_is_linear_over_disjoint_vectors(
        (owner, m) in (1usize..120, 1usize..16).prop_flat_map(|(n, d)| (
            prop::collection::vec(0u8..3, n),
            prop::collection::vec(-1.0f64..1.0, n * d).prop_map(move |v| Array2::from_shape_vec((n, d), v).unwrap()),
        ))
    ) {
        let split = |k| MotifVector::from_bits(owner.iter().map(|&o| o == k).collect());
        let (t1, t2) = (split(1), split(2));
        let union = MotifVector::from_bits(owner.iter().map(|&o| o != 0).collect());
        let sum = motif_prompt(&t1, &m).unwrap() + motif_prompt(&t2, &m).unwrap();
        let whole = motif_prompt(&union, &m).unwrap();
        for (x, y) in sum.iter().zip(whole.iter()) {
            prop_assert!((x - y).abs() <= 1e-12);
        }
    }

    #[test]
    fn extending_a_protein_keeps_motif_bits(a in protein(), b in protein()) {
        let dict = MotifDictionary::bundled();
        let extended = ProteinSequence::new(format!("{}{}", a.as_str(), b.as_str())).unwrap();
        let before = protein_motif_vector(&a, &dict);
        let after = protein_motif_vector(&extended, &dict);
        for i in before.ones() {
            prop_assert!(after.get(i));
        }
    }

    #[test]
    fn random_selfies_decode_to_valid_graphs(tokens in prop::collection::vec(prop::sample::select(selfies_alphabet()), 1..30)) {
        let g = decode_selfies(&SelfiesString::from_tokens(tokens).unwrap()).unwrap();
        prop_assert!(check_valence(&g).is_valid());
    }

    #[test]
    fn canonical_form_ignores_atom_order(order in Just((0..11).collect::<Vec<usize>>()).prop_shuffle()) {
        let g = parse_smiles("CC(=O)Nc1ccc(O)cc1").unwrap();
        prop_assert_eq!(canonical_form(&g.permuted(&order)), canonical_form(&g));
    }

    #[test]
    fn plan_weights_sum_to_one(ratios in prop::collection::vec(0.0f64..1.0, 1..20)) {
        prop_assume!(ratios.iter().any(|&r| r > 0.0));
        let table: Vec<(String, f64)> = ratios.iter().enumerate().map(|(i, &r)| (format!("task{i}"), r)).collect();
        let plan = build_plan(2, &table).unwrap();
        let total: f64 = plan.entries.iter().map(|e| e.weight).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        prop_assert!(plan.entries.iter().all(|e| e.weight >= 0.0));
    }
}
