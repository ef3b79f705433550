#![allow(dead_code)]

use covergeo_core::rng::{below, unit_f64, CounterRng};
use covergeo_core::{GridSet, Lattice};

/// Sequential draws from the counter generator, for building random
/// test inputs.
pub struct Draws {
    rng: CounterRng,
    next: u64,
}

impl Draws {
    pub fn new(seed: u64) -> Self {
        Draws { rng: CounterRng::new(seed), next: 0 }
    }

    pub fn u64(&mut self) -> u64 {
        self.next += 1;
        self.rng.block(self.next, 0, 0)[0]
    }

    pub fn below(&mut self, n: u64) -> u64 {
        below(self.u64(), n)
    }

    pub fn unit(&mut self) -> f64 {
        unit_f64(self.u64())
    }

    pub fn chance(&mut self, p: f64) -> bool {
        self.unit() < p
    }
}

/// Random 2D set on a `w`×`h` lattice (rim included) with the given fill
/// density in the interior.
pub fn random_set_2d(d: &mut Draws, w: usize, h: usize, density: f64) -> GridSet {
    let lat = Lattice::new(&[w, h], 1.0, &[0.0, 0.0]).unwrap();
    let mask = (0..lat.len()).map(|i| !lat.on_rim(i) && d.chance(density)).collect();
    GridSet::new(lat, mask).unwrap()
}

pub fn random_set_3d(d: &mut Draws, side: usize, density: f64) -> GridSet {
    let lat = Lattice::new(&[side, side, side], 1.0, &[0.0; 3]).unwrap();
    let mask = (0..lat.len()).map(|i| !lat.on_rim(i) && d.chance(density)).collect();
    GridSet::new(lat, mask).unwrap()
}

pub fn is_subset(a: &GridSet, b: &GridSet) -> bool {
    a.is_subset_of(b).unwrap()
}
