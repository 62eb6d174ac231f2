//! Runs in its own process so the environment override cannot leak into
//! other tests.

use wss_core::dyadic::BitDepth;
use wss_core::grid::Grid2D;
use wss_core::partial_sums::{max_bits_2d, DiagonalSums};
use wss_core::WssError;

#[test]
fn env_override_tightens_and_loosens_the_guard() {
    std::env::set_var("WSS_MAX_B", "4");
    assert_eq!(max_bits_2d(), 4);
    let f = Grid2D::constant(BitDepth::new(5).unwrap(), 1.0).unwrap();
    assert!(matches!(DiagonalSums::new(&f), Err(WssError::Resource(_))));

    std::env::set_var("WSS_MAX_B", "9");
    let g = Grid2D::constant(BitDepth::new(9).unwrap(), 1.0).unwrap();
    assert!(DiagonalSums::new(&g).is_ok());
}
