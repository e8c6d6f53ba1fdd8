//! Invariants over random input, checked tick by tick.

mod common;

use climbloop_core::engine::level_state_bytes;
use climbloop_core::geometry::distance;
use climbloop_core::{GameEvent, Scene};
use proptest::prelude::*;

use common::*;

fn scene_rank(s: Scene) -> u8 {
    match s {
        Scene::MainMenu => 0,
        Scene::Game => 1,
        Scene::Credits => 2,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn step_invariants(seed in any::<u64>(), attempt in 1u32..=7, from_menu in any::<bool>()) {
        let engine = engine();
        let mut world = if from_menu { engine.world_at_menu() } else { engine.world_init(attempt) };
        let level = engine.level();
        for f in random_frames(seed, 1500) {
            let before = world.clone();
            engine.step(&mut world, &f);

            prop_assert_eq!(world.ui_tick, before.ui_tick + 1);
            prop_assert!(world.sim_tick <= world.ui_tick);
            prop_assert!(world.sim_tick - before.sim_tick <= 1);
            prop_assert!(scene_rank(world.scene) >= scene_rank(before.scene));
            prop_assert!(world.session.current_attempt >= before.session.current_attempt);

            let restarted = world.events.iter().any(|e| matches!(e.event, GameEvent::Restart(_)));
            if !restarted {
                // triggers only ever switch off, and fire once
                for (b, a) in before.triggers.iter().zip(&world.triggers) {
                    prop_assert!(!(a.active && !b.active));
                    prop_assert!(!(b.fired && !a.fired));
                }
                prop_assert!(world.timer.remaining <= before.timer.remaining
                    || world.events.iter().any(|e| e.event == GameEvent::TimerStop));
                prop_assert!(world.player.health <= before.player.health);
            }
            prop_assert!(world.timer.remaining >= 0.0 && world.timer.remaining <= world.timer.duration);
            let fires = world.events.iter().filter(|e| matches!(e.event, GameEvent::Trigger(_))).count();
            prop_assert!(fires <= 1);

            // platforms stay near their polylines
            for p in &world.platforms {
                let def = &level.platforms[p.def];
                let near = def.waypoints.iter().zip(def.waypoints.iter().cycle().skip(1)).any(|(&a, &b)| {
                    let ab = b - a;
                    let len2 = ab.x * ab.x + ab.y * ab.y;
                    let t = if len2 == 0.0 { 0.0 } else { (((p.position - a).x * ab.x + (p.position - a).y * ab.y) / len2).clamp(0.0, 1.0) };
                    distance(p.position, a + ab * t) <= 0.1 + def.speed * engine.dt()
                });
                prop_assert!(near, "platform {} strayed to {:?}", def.id, p.position);
            }
            prop_assert!(world.player.body.center.is_finite());
        }
    }
}

#[test]
fn restart_rebuilds_the_level_from_scratch() {
    let engine = engine();
    for seed in 0..20u64 {
        let mut world = engine.world_init(1);
        drive(&engine, &mut world, random_frames(seed, 800));
        if world.scene != Scene::Game {
            continue;
        }
        let next = world.session.current_attempt + 1;
        engine.restart_level(&mut world);
        assert_eq!(world.session.current_attempt, next);
        assert_eq!(level_state_bytes(&world), level_state_bytes(&engine.world_init(next)), "seed {seed}");
    }
}

#[test]
fn menu_waits_for_a_press() {
    let engine = engine();
    let mut world = engine.world_at_menu();
    drive(&engine, &mut world, std::iter::repeat_n(climbloop_core::InputFrame { move_x: 1.0, ..Default::default() }, 100));
    assert_eq!(world.scene, Scene::MainMenu);
    assert_eq!(world.sim_tick, 0);
    drive(&engine, &mut world, [climbloop_core::InputFrame { jump_pressed: true, ..Default::default() }]);
    assert_eq!(world.scene, Scene::Game);
}
