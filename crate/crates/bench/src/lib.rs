//! Benchmark fixtures shared by the criterion targets.

use thermsched::experiment::{random_instance, RandomModel};
use thermsched::reductions::{gen_from_3partition, gen_from_n3dm, N3dmInstance, ThreePartitionInstance};
use thermsched::Instance;

/// `count` seeded random instances with `jobs` jobs each.
pub fn random_batch(jobs: usize, release_span: u32, max_window: u32, count: u64) -> Vec<Instance> {
    (0..count)
        .map(|seed| random_instance(&RandomModel::new(jobs, release_span, max_window, seed)))
        .collect()
}

pub fn three_partition_pair() -> (Instance, Instance) {
    let yes = ThreePartitionInstance::new(vec![5, 5, 6, 5, 5, 6]).unwrap();
    let no = ThreePartitionInstance::new(vec![6, 4, 4, 4, 4, 4]).unwrap();
    (gen_from_3partition(&yes).unwrap().0, gen_from_3partition(&no).unwrap().0)
}

pub fn n3dm_pair() -> (Instance, Instance) {
    let yes = N3dmInstance::new(vec![0, 6], vec![6, 0], vec![2, 2], 8).unwrap();
    let no = N3dmInstance::new(vec![1, 1], vec![1, 1], vec![0, 4], 4).unwrap();
    (gen_from_n3dm(&yes).unwrap().0, gen_from_n3dm(&no).unwrap().0)
}
