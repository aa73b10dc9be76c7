use proptest::prelude::*;

use thermsched::io::{from_json, parse_instance, parse_schedule, serialize_instance, serialize_schedule, to_canonical_json};
use thermsched::{
    check_reasonable, enumerate_optimal_bruteforce, run_online, simulate, solve_optimal, step_temperature, CoolestFirst,
    EarliestDeadlineFirst, Instance, Job, JobId, OnlinePolicy, Rational, Schedule, SimulationTrace, SolveOptions,
    ThermalConfig,
};

fn heat() -> impl Strategy<Value = Rational> {
    (0i64..=32).prop_map(|k| Rational::frac(k, 16))
}

fn instance(max_jobs: usize, max_release: u32, max_len: u32) -> impl Strategy<Value = Instance> {
    prop::collection::vec((0..max_release, 1..=max_len, heat()), 0..=max_jobs).prop_map(|specs| {
        Instance::with_default_config(
            specs
                .into_iter()
                .enumerate()
                .map(|(i, (r, len, h))| Job::new(i as u32 + 1, r, r + len, h))
                .collect(),
        )
    })
}

/// An instance with a schedule that uses each job at most once, anywhere.
fn instance_and_schedule() -> impl Strategy<Value = (Instance, Schedule)> {
    instance(6, 6, 4).prop_flat_map(|inst| {
        let n = inst.len() as u32;
        let h = inst.horizon().max(1) as usize;
        (Just(inst), prop::collection::vec(0..=n, h)).prop_map(|(inst, picks)| {
            let mut seen = std::collections::HashSet::new();
            let slots = picks
                .into_iter()
                .map(|p| (p > 0 && seen.insert(p)).then_some(JobId(p)))
                .collect();
            (inst, Schedule { slots })
        })
    })
}

fn opt(inst: &Instance) -> usize {
    solve_optimal(inst, SolveOptions::default()).unwrap().best_throughput
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn idle_step_halves(num in 0i64..1000, den in 1i64..1000) {
        let tau = Rational::frac(num, den);
        let next = step_temperature(&tau, &Rational::zero(), &ThermalConfig::default());
        prop_assert!(next <= tau);
        prop_assert_eq!(&next + &next, tau);
    }

    #[test]
    fn temperatures_match_closed_form((inst, sched) in instance_and_schedule()) {
        let trace = simulate(&inst, &sched);
        for (t, tau) in trace.temperatures.iter().enumerate() {
            let closed: Rational = sched
                .scheduled_jobs()
                .filter(|&(u, _)| (u as usize) < t)
                .map(|(u, id)| &inst.job(id).unwrap().heat * &Rational::pow2(u as i64 - t as i64))
                .sum();
            prop_assert_eq!(&closed, tau);
        }
    }

    #[test]
    fn idling_a_slot_never_raises_temperatures((inst, sched) in instance_and_schedule(), pick in any::<prop::sample::Index>()) {
        let busy: Vec<usize> = sched.scheduled_jobs().map(|(u, _)| u as usize).collect();
        prop_assume!(!busy.is_empty());
        let mut lighter = sched.clone();
        lighter.slots[busy[pick.index(busy.len())]] = None;
        let a = simulate(&inst, &sched);
        let b = simulate(&inst, &lighter);
        prop_assert!(b.temperatures.iter().zip(&a.temperatures).all(|(x, y)| x <= y));
        prop_assert!(b.violations.len() <= a.violations.len());
    }

    #[test]
    fn builtin_policies_are_reasonable_and_feasible(inst in instance(8, 8, 5)) {
        for policy in [&CoolestFirst as &dyn OnlinePolicy, &EarliestDeadlineFirst] {
            let run = run_online(&inst, policy).unwrap();
            prop_assert!(run.trace.is_feasible());
            prop_assert!(check_reasonable(&run).is_empty());
            let again = run_online(&inst, policy).unwrap();
            prop_assert_eq!(&run.schedule, &again.schedule);
        }
    }

    #[test]
    fn online_decisions_ignore_future_jobs(inst in instance(6, 6, 4), cut in 0u32..8) {
        // jobs released after `cut` cannot change decisions before `cut`
        let early = Instance::new(
            inst.jobs.iter().filter(|j| j.release < cut).cloned().collect(),
            inst.config.clone(),
        );
        for policy in [&CoolestFirst as &dyn OnlinePolicy, &EarliestDeadlineFirst] {
            let full = run_online(&inst, policy).unwrap();
            let part = run_online(&early, policy).unwrap();
            let upto = (cut as usize).min(part.schedule.len());
            prop_assert_eq!(&full.schedule.slots[..upto], &part.schedule.slots[..upto]);
        }
    }

    #[test]
    fn online_is_within_half_of_optimal(inst in instance(7, 6, 5)) {
        let best = opt(&inst);
        for policy in [&CoolestFirst as &dyn OnlinePolicy, &EarliestDeadlineFirst] {
            let alg = run_online(&inst, policy).unwrap().trace.throughput;
            prop_assert!(alg <= best);
            prop_assert!(2 * alg >= best, "{} got {} of {}", policy.name(), alg, best);
        }
    }

    #[test]
    fn optimum_monotone_under_removal_and_relaxation(inst in instance(6, 6, 4), extra in 1u32..4) {
        let best = opt(&inst);
        for job in &inst.jobs {
            let less = opt(&inst.without(job.id));
            prop_assert!(less <= best && less + 1 >= best);
        }
        if !inst.is_empty() {
            let mut relaxed = inst.clone();
            relaxed.jobs[0].deadline += extra;
            prop_assert!(opt(&relaxed) >= best);
        }
    }

    #[test]
    fn optimum_invariant_under_renumbering(inst in instance(6, 6, 4), offset in 1u32..50) {
        let n = inst.len() as u32;
        let renumbered = Instance::with_default_config(
            inst.jobs
                .iter()
                .map(|j| Job::new(offset + n - j.id.0, j.release, j.deadline, j.heat.clone()))
                .collect(),
        );
        prop_assert_eq!(opt(&inst), opt(&renumbered));
    }

    #[test]
    fn solver_agrees_with_brute_force(inst in instance(6, 6, 4)) {
        let fast = solve_optimal(&inst, SolveOptions::default()).unwrap();
        prop_assert_eq!(fast.best_throughput, enumerate_optimal_bruteforce(&inst).unwrap());
        let trace = simulate(&inst, &fast.witness);
        prop_assert!(trace.is_feasible());
        prop_assert_eq!(trace.throughput, fast.best_throughput);
    }

    #[test]
    fn documents_round_trip((inst, sched) in instance_and_schedule()) {
        let text = serialize_instance(&inst);
        let back = parse_instance(&text).unwrap();
        prop_assert_eq!(&back, &inst);
        prop_assert_eq!(serialize_instance(&back), text);

        prop_assert_eq!(parse_schedule(&serialize_schedule(&sched)).unwrap(), sched.clone());

        let trace = simulate(&inst, &sched);
        let back: SimulationTrace = from_json(&to_canonical_json(&trace)).unwrap();
        prop_assert_eq!(back, trace);
    }

    #[test]
    fn rationals_round_trip_through_text(num in -10_000i64..10_000, den in 1i64..10_000) {
        let q = Rational::frac(num, den);
        prop_assert_eq!(q.to_string().parse::<Rational>().unwrap(), q);
    }
}
