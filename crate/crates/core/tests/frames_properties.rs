mod common;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;
use unikb::frames::{
    frame_consistent, frame_more_general, parse_frame_expr, parse_frames, translate_theta, FrameDefinition,
    FrameExpr, FrameKB, SlotConstraint, SlotSpec,
};
use unikb::kb::{parse_kb, ConceptExpr};
use unikb::reason::{subsumption_counterexample, SearchBudget};

use common::{figure, names, rng};

fn random_constraint(r: &mut impl Rng, frames: &[String], depth: usize) -> SlotConstraint {
    if depth == 0 {
        return SlotConstraint::Frame(frames.choose(r).unwrap().clone());
    }
    match r.gen_range(0..5) {
        0 => SlotConstraint::Intersection(
            Box::new(random_constraint(r, frames, depth - 1)),
            Box::new(random_constraint(r, frames, depth - 1)),
        ),
        1 => SlotConstraint::Union(
            Box::new(random_constraint(r, frames, depth - 1)),
            Box::new(random_constraint(r, frames, depth - 1)),
        ),
        2 => SlotConstraint::Not(Box::new(random_constraint(r, frames, depth - 1))),
        _ => SlotConstraint::Frame(frames.choose(r).unwrap().clone()),
    }
}

fn random_frames(r: &mut impl Rng) -> FrameKB {
    let frames = names("F", r.gen_range(1..=4));
    let slots = names("s", r.gen_range(1..=2));
    let defs = frames
        .iter()
        .enumerate()
        .map(|(k, name)| {
            let supers = frames[..k].iter().filter(|_| r.gen_bool(0.3)).cloned().collect();
            let mut specs = Vec::new();
            for s in &slots {
                if r.gen_bool(0.4) {
                    let min = r.gen_bool(0.5).then(|| r.gen_range(1..=2));
                    let max = r.gen_bool(0.5).then(|| min.unwrap_or(1) + r.gen_range(0..=2));
                    let value_class = random_constraint(r, &frames, 2);
                    specs.push(SlotSpec { slot: s.clone(), value_class, min, max });
                }
            }
            FrameDefinition { name: name.clone(), body: FrameExpr { supers, slots: specs } }
        })
        .collect();
    FrameKB::new("K", defs).unwrap()
}

#[test]
fn university_frames_translate_to_the_expected_knowledge_base() {
    let f = parse_frames(&figure("fig2.frm")).unwrap();
    let kb = translate_theta(&f);
    let expected = parse_kb(&figure("fig3.kb")).unwrap();
    assert!(kb.equivalent_to(&expected), "got\n{kb}");
    assert_eq!(kb.assertions().len(), 5);
    let lhs: Vec<&str> = kb.assertions().iter().map(|a| a.lhs.as_str()).collect();
    assert!(!lhs.contains(&"Professor") && !lhs.contains(&"Student"));
}

#[test]
fn university_reasoning() {
    let f = parse_frames(&figure("fig2.frm")).unwrap();
    let budget = SearchBudget::up_to(3).unwrap();
    for frame in ["Course", "BasCourse", "GradStudent", "Undergrad", "Professor"] {
        assert!(frame_consistent(&f, frame, SearchBudget::up_to(4).unwrap()).unwrap().is_witness(), "{frame}");
    }
    // two enrolled graduate students, their degree and a teacher
    let v = frame_consistent(&f, "AdvCourse", SearchBudget::up_to(6).unwrap()).unwrap();
    assert!(v.is_witness(), "{v:?}");
    let e = parse_frame_expr("SuperClasses: Course", &f).unwrap();
    assert!(!frame_more_general(&f, "BasCourse", &e, budget).unwrap().is_witness());
    let e = parse_frame_expr("SuperClasses: AdvCourse", &f).unwrap();
    assert!(frame_more_general(&f, "BasCourse", &e, SearchBudget::up_to(5).unwrap()).unwrap().is_witness());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn translation_shape(seed in any::<u64>()) {
        let f = random_frames(&mut rng(seed));
        let kb = translate_theta(&f);
        for a in kb.assertions() {
            prop_assert!(a.rhs.role_uses().iter().all(|r| !r.inverted));
        }
        let nonempty = f.frames.iter().filter(|d| !d.body.is_empty()).count();
        prop_assert_eq!(kb.assertions().len(), nonempty);
        let lhs: std::collections::BTreeSet<&str> = kb.assertions().iter().map(|a| a.lhs.as_str()).collect();
        prop_assert_eq!(lhs.len(), nonempty);
        for d in &f.frames {
            prop_assert!(kb.concepts().contains(&d.name));
        }
    }

    #[test]
    fn rendering_round_trips(seed in any::<u64>()) {
        let f = random_frames(&mut rng(seed));
        let back = parse_frames(&f.to_string()).unwrap();
        prop_assert_eq!(translate_theta(&back), translate_theta(&f));
    }

    #[test]
    fn frames_are_subsumed_by_their_superclasses(seed in any::<u64>()) {
        let f = random_frames(&mut rng(seed));
        let kb = translate_theta(&f);
        let budget = SearchBudget::up_to(3).unwrap();
        for d in &f.frames {
            for sup in &d.body.supers {
                let v = subsumption_counterexample(&kb, &ConceptExpr::atom(&d.name), &ConceptExpr::atom(sup), budget).unwrap();
                prop_assert!(!v.is_witness(), "{} not below {}", d.name, sup);
            }
        }
    }
}
