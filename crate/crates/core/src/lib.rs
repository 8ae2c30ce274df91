// NaN must fail range guards, so `!(x > t)` is intentional; tensor loops index several arrays at once
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop, clippy::type_complexity)]

pub mod catalog;
pub mod complex;
pub mod dsl;
pub mod jet;
pub mod tensor;
pub mod verify;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/jets.md")]
    mod jets {}
    #[doc = include_str!("../../../book/src/charts.md")]
    mod charts {}
    #[doc = include_str!("../../../book/src/curvature.md")]
    mod curvature {}
    #[doc = include_str!("../../../book/src/complex.md")]
    mod complex {}
    #[doc = include_str!("../../../book/src/catalog.md")]
    mod catalog {}
    #[doc = include_str!("../../../book/src/verify.md")]
    mod verify {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
