#![allow(dead_code)]

use std::f64::consts::PI;

use adscone::hs_surface::{
    DeSitterRegion, DsTopology, HSSphereClass, HyperbolicRegion, ParabolicPoint, PhotonCircle, RegionRef,
    SingularHSSurface, TimeOrientation,
};
use adscone::links::SingularityType;

pub type Sphere = SingularHSSurface<f64>;

/// A labelled HS-sphere; `expected` is `None` for spheres the causality filter must reject.
pub struct Fixture {
    pub name: &'static str,
    pub sphere: Sphere,
    pub expected: Option<HSSphereClass>,
}

fn region(o: TimeOrientation, angles: &[f64], cusps: usize) -> HyperbolicRegion<f64> {
    HyperbolicRegion { orientation: o, genus: 0, cone_angles: angles.to_vec(), cusps, surface: None }
}

fn ds(topology: DsTopology, singularities: Vec<SingularityType<f64>>) -> DeSitterRegion<f64> {
    DeSitterRegion { topology, singularities }
}

fn circle(h: usize, d: usize, gravitons: Vec<SingularityType<f64>>) -> PhotonCircle<f64> {
    PhotonCircle { sides: [RegionRef::Hyperbolic(h), RegionRef::DeSitter(d)], gravitons }
}

/// Future disk, de Sitter annulus, past disk.
pub fn collision(future: &[f64], past: &[f64], annulus: Vec<SingularityType<f64>>) -> Sphere {
    SingularHSSurface {
        hyperbolic_regions: vec![region(TimeOrientation::Future, future, 0), region(TimeOrientation::Past, past, 0)],
        de_sitter_regions: vec![ds(DsTopology::Annulus, annulus)],
        photon_circles: vec![circle(0, 0, vec![]), circle(1, 0, vec![])],
        parabolic_points: vec![],
    }
}

/// A past hyperbolic region bounded by de Sitter disks, each closed by a future black hole.
fn black_hole(angles: &[f64], holes: &[f64]) -> Sphere {
    SingularHSSurface {
        hyperbolic_regions: vec![region(TimeOrientation::Past, angles, 0)],
        de_sitter_regions: holes.iter().map(|&l| ds(DsTopology::Disk, vec![SingularityType::BtzFuture { length: l }])).collect(),
        photon_circles: (0..holes.len()).map(|j| circle(0, j, vec![])).collect(),
        parabolic_points: vec![],
    }
}

fn lone(o: TimeOrientation, angles: &[f64], cusps: usize) -> Sphere {
    SingularHSSurface {
        hyperbolic_regions: vec![region(o, angles, cusps)],
        de_sitter_regions: vec![],
        photon_circles: vec![],
        parabolic_points: vec![],
    }
}

pub fn corpus() -> Vec<Fixture> {
    let tachyon = |m: f64| SingularityType::Tachyon { mass: m };
    let bh_a = black_hole(&[1.0, 1.0], &[0.8]);
    let bh_b = black_hole(&[PI / 2.0, PI / 3.0], &[1.2, 0.4]);
    let mut graviton_collision = collision(&[PI / 2.0], &[PI / 3.0, PI / 3.0], vec![tachyon(0.5)]);
    graviton_collision.photon_circles[0].gravitons.push(SingularityType::GravitonPositive);

    let bhwh_sphere = SingularHSSurface {
        hyperbolic_regions: vec![],
        de_sitter_regions: vec![ds(
            DsTopology::Sphere,
            vec![SingularityType::BtzFuture { length: 1.0 }, SingularityType::BtzPast { length: 0.7 }, tachyon(0.3)],
        )],
        photon_circles: vec![],
        parabolic_points: vec![],
    };
    let bhwh_extreme = SingularHSSurface {
        hyperbolic_regions: vec![],
        de_sitter_regions: vec![ds(DsTopology::Disk, vec![SingularityType::BtzFuture { length: 0.5 }, tachyon(1.0)])],
        photon_circles: vec![],
        parabolic_points: vec![ParabolicPoint { region: 0, orientation: TimeOrientation::Past }],
    };

    let mut ctc = collision(&[PI], &[PI, PI], vec![]);
    ctc.de_sitter_regions[0].singularities.push(SingularityType::RejectedSpacelikeHyperbolic);
    let mut degree_four = collision(&[PI], &[PI, PI], vec![]);
    degree_four.de_sitter_regions[0].singularities.push(SingularityType::RejectedDegree { degree: 4 });
    // Both ends of the de Sitter disk are future ends.
    let misplaced = SingularHSSurface {
        hyperbolic_regions: vec![region(TimeOrientation::Future, &[1.0, 1.0, 1.0], 0)],
        de_sitter_regions: vec![ds(DsTopology::Disk, vec![SingularityType::BtzFuture { length: 1.0 }])],
        photon_circles: vec![circle(0, 0, vec![])],
        parabolic_points: vec![],
    };

    use HSSphereClass::*;
    vec![
        Fixture { name: "two-particle collision", sphere: collision(&[PI], &[2.0 * PI / 3.0; 2], vec![]), expected: Some(CausallyRegular) },
        Fixture { name: "collision with tachyon and graviton", sphere: graviton_collision, expected: Some(CausallyRegular) },
        Fixture { name: "black hole, one horizon", sphere: bh_a.clone(), expected: Some(BlackHoleInteraction) },
        Fixture { name: "black hole, two horizons", sphere: bh_b.clone(), expected: Some(BlackHoleInteraction) },
        Fixture { name: "white hole, one horizon", sphere: bh_a.time_reverse(), expected: Some(WhiteHoleInteraction) },
        Fixture { name: "white hole, two horizons", sphere: bh_b.time_reverse(), expected: Some(WhiteHoleInteraction) },
        Fixture { name: "big crunch", sphere: lone(TimeOrientation::Future, &[PI, PI, PI, PI / 2.0], 0), expected: Some(BigBangOrCrunch) },
        Fixture { name: "big bang with cusp", sphere: lone(TimeOrientation::Past, &[1.0, 1.0, 1.0], 1), expected: Some(BigBangOrCrunch) },
        Fixture { name: "black and white hole", sphere: bhwh_sphere, expected: Some(BHWHInteraction) },
        Fixture { name: "black hole and extreme white hole", sphere: bhwh_extreme, expected: Some(BHWHInteraction) },
        Fixture { name: "spacelike hyperbolic line", sphere: ctc, expected: None },
        Fixture { name: "degree four line", sphere: degree_four, expected: None },
        Fixture { name: "misplaced black hole", sphere: misplaced, expected: None },
    ]
}
