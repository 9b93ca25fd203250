use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use proptest::sample::select;

use phonostream::analysis::{
    binomial_test, compare_inventories, frequency_table, frequency_table_par, info_by_age, AgedUtterance, InfoOptions,
    ModelScope, Smoothing, UnigramModel,
};
use phonostream::corpus::{self, ConvertOptions, CorpusSchema};
use phonostream::folding::{diff_inventory, FoldMap};
use phonostream::g2p::{Backend, SyllableTable, UnmappedReport};
use phonostream::inventory::{best_match, load_inventories, CountProfile, Inventory};
use phonostream::stream::segment_types;
use phonostream::{IpaSegment, PhonemeStream, StreamToken};

const SEGMENTS: &[&str] = &[
    "p", "b", "t", "k", "a", "i", "u", "ɔɪ", "aɪ", "dʒ", "ɛ̃", "n̪", "kʰ", "eː", "ʃ",
];

fn seg(s: &str) -> IpaSegment {
    IpaSegment::new(s).expect("valid segment")
}

fn token() -> impl Strategy<Value = StreamToken> {
    prop_oneof![
        8 => select(SEGMENTS).prop_map(|s| StreamToken::Segment(seg(s))),
        1 => Just(StreamToken::WordBoundary),
        1 => Just(StreamToken::UttBoundary),
    ]
}

fn stream() -> impl Strategy<Value = PhonemeStream> {
    prop::collection::vec(token(), 0..30).prop_map(PhonemeStream::from_tokens)
}

fn segment_set() -> impl Strategy<Value = BTreeSet<IpaSegment>> {
    prop::collection::btree_set(select(SEGMENTS).prop_map(seg), 0..SEGMENTS.len())
}

fn inventory_csv(inventories: &[(u32, BTreeSet<IpaSegment>)]) -> String {
    let mut csv = String::from("InventoryID,LanguageName,ISO6393,Phoneme,SegmentClass,syllabic\n");
    for (id, segments) in inventories {
        for s in segments {
            let class = if ["a", "i", "u", "ɔɪ", "aɪ", "ɛ̃", "eː"].contains(&s.as_str()) {
                "vowel"
            } else {
                "consonant"
            };
            csv.push_str(&format!("{id},L{id},xxx,{s},{class},0\n"));
        }
    }
    csv
}

fn inventories() -> impl Strategy<Value = Vec<Inventory>> {
    prop::collection::vec(prop::collection::btree_set(select(SEGMENTS).prop_map(seg), 1..10), 1..6).prop_map(|sets| {
        let tagged: Vec<(u32, BTreeSet<IpaSegment>)> = sets
            .into_iter()
            .enumerate()
            .map(|(i, s)| (i as u32 * 3 + 1, s))
            .collect();
        load_inventories(inventory_csv(&tagged).as_bytes()).expect("generated csv loads")
    })
}

proptest! {
    #[test]
    fn emit_without_word_boundaries_never_shows_the_literal(s in stream()) {
        prop_assert!(!s.emit(false).contains("WORD_BOUNDARY"));
    }

    #[test]
    fn profile_survives_round_trip(s in stream()) {
        let again = PhonemeStream::parse(&s.emit(true));
        prop_assert_eq!(
            CountProfile::of_segments(&segment_types([&s])),
            CountProfile::of_segments(&segment_types([&again]))
        );
    }

    #[test]
    fn inventory_profile_counts_every_segment(invs in inventories()) {
        for inv in &invs {
            prop_assert_eq!(inv.segments().len(), inv.profile().n_types);
        }
    }

    #[test]
    fn best_match_ignores_candidate_order(invs in inventories(), observed in segment_set(), seed in any::<u64>()) {
        let profile = CountProfile::of_segments(&observed);
        let ranked: Vec<u32> = best_match(&profile, &observed, &invs).unwrap().iter().map(|m| m.inventory.id).collect();
        let mut shuffled = invs.clone();
        // deterministic permutation from the seed
        let n = shuffled.len();
        for i in (1..n).rev() {
            shuffled.swap(i, (seed as usize).wrapping_mul(i + 7) % (i + 1));
        }
        let again: Vec<u32> = best_match(&profile, &observed, &shuffled).unwrap().iter().map(|m| m.inventory.id).collect();
        prop_assert_eq!(ranked, again);
    }

    #[test]
    fn diff_report_partitions(observed in segment_set(), reference in segment_set()) {
        let inv = load_inventories(inventory_csv(&[(1, reference.clone())]).as_bytes())
            .unwrap()
            .pop();
        // an empty reference set makes no inventory at all
        prop_assume!(inv.is_some());
        let report = diff_inventory(&observed, &inv.unwrap());
        prop_assert!(report.unknown.is_disjoint(&reference));
        prop_assert!(report.unknown.is_subset(&observed));
        prop_assert!(report.unseen.is_disjoint(&observed));
        prop_assert!(report.unseen.is_subset(&reference));
        let common = observed.intersection(&reference).count();
        prop_assert_eq!(report.unknown.len() + common, observed.len());
        prop_assert_eq!(report.unseen.len() + common, reference.len());
    }

    #[test]
    fn venn_partition_covers_the_union(a in segment_set(), b in segment_set()) {
        let report = compare_inventories(&a, &b);
        let union: BTreeSet<_> = a.union(&b).cloned().collect();
        let parts: BTreeSet<_> = report.only_a.iter().chain(&report.both).chain(&report.only_b).cloned().collect();
        prop_assert_eq!(parts, union);
        prop_assert!(report.only_a.is_disjoint(&report.both));
        prop_assert!(report.only_a.is_disjoint(&report.only_b));
        prop_assert!(report.both.is_disjoint(&report.only_b));
    }

    #[test]
    fn token_count_law(s in stream(), pick in 0usize..6) {
        let maps = [
            ("a -> ɑ", 0isize),
            ("d ʒ -> dʒ", -1),
            ("t t t -> tː", -2),
            ("aɪ -> a ɪ", 1),
            ("ʃ -> s j ʃ", 2),
            ("kʰ ->", -1),
        ];
        let (text, delta) = maps[pick];
        let map = FoldMap::parse(text).unwrap();
        let (out, fired) = map.apply_counting(&s);
        prop_assert_eq!(
            out.segment_count() as isize - s.segment_count() as isize,
            fired[0] as isize * delta
        );
    }

    #[test]
    fn folding_keeps_boundaries_in_place(s in stream()) {
        // no rule deletes, so every word and utterance survives
        let map = FoldMap::parse("a i -> aɪ\nk -> kʰ\np -> p b\n").unwrap();
        let out = map.apply(&s);
        let shape = |x: &PhonemeStream| -> Vec<usize> {
            x.tokens().iter().filter(|t| t.is_boundary()).map(|t| match t {
                StreamToken::WordBoundary => 0,
                _ => 1,
            }).collect()
        };
        prop_assert_eq!(shape(&out), shape(&s));
    }

    #[test]
    fn unmapped_merge_is_commutative_and_associative(
        a in prop::collection::vec(select(&['x', 'y', 'z', 'q'][..]), 0..10),
        b in prop::collection::vec(select(&['x', 'y', 'z', 'q'][..]), 0..10),
        c in prop::collection::vec(select(&['x', 'y', 'z', 'q'][..]), 0..10),
    ) {
        let report = |chars: &[char]| {
            let mut r = UnmappedReport::default();
            r.record(chars);
            r
        };
        let (ra, rb, rc) = (report(&a), report(&b), report(&c));
        let mut ab = ra.clone();
        ab.merge(&rb);
        let mut ba = rb.clone();
        ba.merge(&ra);
        prop_assert_eq!(&ab, &ba);
        let mut ab_c = ab.clone();
        ab_c.merge(&rc);
        let mut bc = rb.clone();
        bc.merge(&rc);
        let mut a_bc = ra.clone();
        a_bc.merge(&bc);
        prop_assert_eq!(ab_c, a_bc);
    }

    #[test]
    fn syllables_concatenate_back(keys in prop::collection::vec(select(&["ma1", "ma", "ni3", "hao3", "de", "zhong1", "n2"][..]), 1..6)) {
        let table = SyllableTable::from_path(concat!(env!("CARGO_MANIFEST_DIR"), "/data/pinyin.tsv")).unwrap();
        let word: String = keys.concat();
        let parts = table.syllabify(&word).unwrap();
        prop_assert_eq!(parts.concat(), word);
    }

    #[test]
    fn model_mass_is_one(streams in prop::collection::vec(stream(), 1..5), add_one in any::<bool>()) {
        let smoothing = if add_one { Smoothing::AddOne } else { Smoothing::None };
        match UnigramModel::build(&streams, smoothing) {
            Ok(model) => prop_assert!((model.total_mass() - 1.0).abs() < 1e-9),
            Err(_) => prop_assert!(streams.iter().all(|s| s.segment_count() == 0)),
        }
    }

    #[test]
    fn uniform_information(n in 1usize..20, v in 1usize..SEGMENTS.len()) {
        let counts: BTreeMap<IpaSegment, u64> = SEGMENTS[..v].iter().map(|s| (seg(s), 3)).collect();
        let model = UnigramModel::from_counts(counts, Smoothing::None).unwrap();
        let utterance = PhonemeStream::from_segments((0..n).map(|i| seg(SEGMENTS[i % v])));
        let bits = model.information(&utterance).unwrap();
        prop_assert!(bits >= 0.0);
        prop_assert!((bits - n as f64 * (v as f64).log2()).abs() < 1e-9);
    }

    #[test]
    fn binomial_is_a_probability(n in 1u64..400, k in 0u64..400, p in 0.0f64..=1.0) {
        let k = k.min(n);
        let tail = binomial_test(k, n, p).unwrap();
        prop_assert!((0.0..=1.0).contains(&tail));
        if k < n {
            prop_assert!(binomial_test(k + 1, n, p).unwrap() <= tail + 1e-15);
        }
    }

    #[test]
    fn parallel_frequencies_match(streams in prop::collection::vec(stream(), 0..40)) {
        prop_assert_eq!(frequency_table_par(&streams), frequency_table(&streams));
    }

    #[test]
    fn info_curve_is_seed_deterministic(ages in prop::collection::vec(0.0f64..72.0, 1..30), seed in any::<u64>()) {
        let utterances: Vec<AgedUtterance> = ages.iter().enumerate().map(|(i, &age)| AgedUtterance {
            age_months: age,
            stream: PhonemeStream::from_segments((0..=i % 4).map(|j| seg(SEGMENTS[(i + j) % 5]))),
        }).collect();
        let options = InfoOptions { scope: ModelScope::PerBucket, sample_size: Some(3), seed, smoothing: Smoothing::None };
        prop_assert_eq!(info_by_age(&utterances, options).unwrap(), info_by_age(&utterances, options).unwrap());
    }

    #[test]
    fn passthrough_corpus_preserves_rows(rows in prop::collection::vec((select(&["MOT", "CHI", "FAT"][..]), stream()), 0..30), workers in 1usize..5) {
        let mut csv = String::from("id,speaker_code,gloss,extra\n");
        for (i, (speaker, s)) in rows.iter().enumerate() {
            csv.push_str(&format!("{i},{speaker},{},\"x, {i}\"\n", s.emit(true)));
        }
        let mut corpus = corpus::read_corpus(csv.as_bytes(), &CorpusSchema::default()).unwrap();
        let options = ConvertOptions { keep_word_boundaries: true, uncorrected: true, workers };
        corpus::convert_corpus(&mut corpus.records, &Backend::Passthrough, None, options).unwrap();
        let mut out = Vec::new();
        corpus::write_corpus(&corpus.records, &corpus.header, &mut out).unwrap();
        let mut reader = csv::Reader::from_reader(out.as_slice());
        let written: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
        prop_assert_eq!(written.len(), rows.len());
        for (i, (record, (speaker, s))) in written.iter().zip(&rows).enumerate() {
            let (id, text, extra) = (i.to_string(), s.emit(true), format!("x, {i}"));
            prop_assert_eq!(&record[0], id.as_str());
            prop_assert_eq!(&record[1], *speaker);
            prop_assert_eq!(&record[2], text.as_str());
            prop_assert_eq!(&record[3], extra.as_str());
            prop_assert_eq!(&record[4], text.as_str());
            prop_assert_eq!(&record[5], if *speaker == "CHI" { "true" } else { "false" });
        }
    }
}
