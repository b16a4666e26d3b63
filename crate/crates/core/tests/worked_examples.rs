use groupform::{
    evolve, measure, step, step_oracle, trajectory, LatticeState, Outcome, TorusShape,
};

fn line(values: &[u64]) -> LatticeState {
    LatticeState::new(TorusShape::line(values.len()).unwrap(), values.to_vec()).unwrap()
}

const FIG1: [u64; 14] = [0, 0, 1, 1, 2, 0, 0, 2, 1, 2, 0, 1, 1, 0];

#[test]
fn figure_one_evolution() {
    let initial = line(&FIG1);
    assert_eq!(initial.total_mass(), 11);
    let out = evolve(&initial, 1400);
    assert_eq!(out.outcome, Outcome::Fixed { n_st: 3 });
    assert_eq!(
        out.steady_state,
        line(&[0, 1, 0, 3, 0, 0, 0, 0, 3, 0, 3, 0, 1, 0])
    );

    let expected = [
        line(&FIG1),
        line(&[0, 1, 1, 0, 0, 2, 2, 0, 1, 0, 3, 0, 0, 1]),
        line(&[1, 0, 0, 3, 0, 0, 0, 0, 3, 0, 3, 0, 0, 1]),
        line(&[0, 1, 0, 3, 0, 0, 0, 0, 3, 0, 3, 0, 1, 0]),
    ];
    let traj = trajectory(&initial, 3);
    assert_eq!(traj, expected);
    for pair in traj.windows(2) {
        assert_eq!(step_oracle(&pair[0]), pair[1]);
        assert_eq!(pair[1].total_mass(), 11);
    }
    let h = measure(&out.steady_state);
    assert_eq!(h.count(1), 2);
    assert_eq!(h.count(3), 3);
}

#[test]
fn figure_one_reflected_and_shifted() {
    let initial = line(&FIG1).reflect().shift(&[5]).unwrap();
    let out = evolve(&initial, 1400);
    assert_eq!(out.outcome, Outcome::Fixed { n_st: 3 });
    let expected = line(&[0, 1, 0, 3, 0, 0, 0, 0, 3, 0, 3, 0, 1, 0])
        .reflect()
        .shift(&[5])
        .unwrap();
    assert_eq!(out.steady_state, expected);
}

#[test]
fn z7_merge_and_histogram() {
    let s = line(&[1, 1, 0, 1, 1, 0, 0]);
    assert_eq!(step(&s), line(&[0, 0, 2, 0, 0, 1, 1]));
    let out = evolve(&s, 100);
    assert_eq!(out.steady_state, line(&[1, 0, 2, 0, 1, 0, 0]));
    let h = measure(&out.steady_state);
    assert_eq!(h.density(1), 2.0 / 7.0);
    assert_eq!(h.density(2), 1.0 / 7.0);
}

#[test]
fn planar_worked_step() {
    // on a 3x3 torus the single row [1, 1, 0] behaves like the 1D state on Z_3
    let shape = TorusShape::plane(3, 3).unwrap();
    let s = LatticeState::new(shape.clone(), vec![0, 0, 0, 1, 1, 0, 0, 0, 0]).unwrap();
    let next = step(&s);
    assert_eq!(next, step_oracle(&s));
    // (1,0): grad = (0, T(1,1) - T(1,2)) = (0, 1) -> (1, 2)
    // (1,1): grad = (0, T(1,2) - T(1,0)) = (0, -1) -> (1, 2)
    assert_eq!(next.get(&[1, 2]), 2);
    assert_eq!(next.total_mass(), 2);
}
