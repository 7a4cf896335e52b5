mod common;

use common::{partition_case, PartKind};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn interval_partition_is_valid_and_stable(seed in any::<u64>()) {
        partition_case(PartKind::Intervals, seed);
    }

    #[test]
    fn product_partition_is_valid_and_stable(seed in any::<u64>()) {
        partition_case(PartKind::Product, seed);
    }

    #[test]
    fn equality_partition_is_valid_and_stable(seed in any::<u64>()) {
        partition_case(PartKind::Equality, seed);
    }
}
