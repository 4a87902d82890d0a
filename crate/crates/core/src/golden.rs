//! Published representative rows, used as golden values.

use crate::catalog::ProtocolId;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GoldenRow {
    /// The bound is `2^-bound_exp`.
    pub bound_exp: i32,
    pub protocol: ProtocolId,
    pub id: &'static str,
    pub n: u32,
    pub p_m: i32,
    pub p_d: i32,
    pub p_t: i32,
    pub b: bool,
    pub c: u64,
    pub m_kb: u64,
    pub f: bool,
    pub total: usize,
    /// Memory cell known to be inconsistent with every other cell.
    pub memory_erratum: bool,
}

pub const BOUND_EXPONENTS: [i32; 6] = [1, 16, 32, 64, 96, 128];

/// Protocols with at least one nondominated instance for some published bound.
pub const NONDOMINATED_PROTOCOLS: [ProtocolId; 7] = [
    ProtocolId::BC,
    ProtocolId::KA,
    ProtocolId::Poulidor,
    ProtocolId::SKI,
    ProtocolId::SwissKnife,
    ProtocolId::TMA,
    ProtocolId::Tree,
];

macro_rules! row {
    ($y:expr, $p:ident, $id:expr, $n:expr, $pm:expr, $pd:expr, $pt:expr, $b:expr, $c:expr, $m:expr, $f:expr, $tot:expr) => {
        row!($y, $p, $id, $n, $pm, $pd, $pt, $b, $c, $m, $f, $tot, false)
    };
    ($y:expr, $p:ident, $id:expr, $n:expr, $pm:expr, $pd:expr, $pt:expr, $b:expr, $c:expr, $m:expr, $f:expr, $tot:expr, $err:expr) => {
        GoldenRow {
            bound_exp: $y,
            protocol: ProtocolId::$p,
            id: $id,
            n: $n,
            p_m: $pm,
            p_d: $pd,
            p_t: $pt,
            b: $b,
            c: $c,
            m_kb: $m,
            f: $f,
            total: $tot,
            memory_erratum: $err,
        }
    };
}

pub const TABLE: [GoldenRow; 41] = [
    row!(1, BC, "BC-{1}", 1, -1, -1, 0, false, 2, 0, true, 256),
    row!(1, KA, "KA-{2,0.5}", 2, -1, 0, 0, false, 1, 0, false, 10),
    row!(1, SKI, "SKI-{3,2}", 3, -1, -1, -3, true, 1, 1, false, 254),
    row!(
        1,
        SwissKnife,
        "SwissKnife-{1}",
        1,
        -1,
        0,
        0,
        false,
        2,
        1,
        true,
        255,
        true
    ),
    row!(1, TMA, "TMA-{2}", 2, -1, -1, 0, false, 1, 0, false, 1),
    row!(1, Tree, "Tree-{2,2}", 2, -1, 0, 0, false, 1, 0, false, 400),
    row!(16, BC, "BC-{16}", 16, -16, -16, 0, false, 2, 0, true, 241),
    row!(
        16,
        KA,
        "KA-{22,0.55}",
        22,
        -16,
        -4,
        0,
        false,
        1,
        0,
        false,
        4
    ),
    row!(
        16,
        Poulidor,
        "Poulidor-{23}",
        23,
        -16,
        -8,
        0,
        false,
        1,
        0,
        false,
        1
    ),
    row!(
        16,
        SKI,
        "SKI-{39,2}",
        39,
        -16,
        -16,
        -39,
        true,
        1,
        0,
        false,
        218
    ),
    row!(
        16,
        SwissKnife,
        "SwissKnife-{16}",
        16,
        -16,
        -6,
        -6,
        false,
        2,
        0,
        true,
        241
    ),
    row!(16, TMA, "TMA-{27}", 27, -16, -16, 0, false, 1, 0, false, 1),
    row!(
        16,
        Tree,
        "Tree-{24,6}",
        24,
        -16,
        -10,
        0,
        false,
        1,
        0,
        false,
        394
    ),
    row!(32, BC, "BC-{32}", 32, -32, -32, 0, false, 2, 0, true, 225),
    row!(
        32,
        KA,
        "KA-{37,0.85}",
        37,
        -32,
        -2,
        0,
        false,
        1,
        0,
        false,
        2
    ),
    row!(
        32,
        Poulidor,
        "Poulidor-{42}",
        42,
        -32,
        -16,
        0,
        false,
        1,
        0,
        false,
        1
    ),
    row!(
        32,
        SKI,
        "SKI-{78,2}",
        78,
        -32,
        -32,
        -78,
        true,
        1,
        0,
        false,
        179
    ),
    row!(
        32,
        SwissKnife,
        "SwissKnife-{32}",
        32,
        -32,
        -13,
        -13,
        false,
        2,
        0,
        true,
        225
    ),
    row!(32, TMA, "TMA-{53}", 53, -32, -32, 0, false, 1, 0, false, 1),
    row!(
        32,
        Tree,
        "Tree-{48,6}",
        48,
        -32,
        -21,
        0,
        false,
        1,
        1,
        false,
        368
    ),
    row!(64, BC, "BC-{64}", 64, -64, -64, 0, false, 2, 0, true, 193),
    row!(64, KA, "KA-{73,0.8}", 73, -64, -6, 0, false, 1, 0, false, 4),
    row!(
        64,
        Poulidor,
        "Poulidor-{78}",
        78,
        -64,
        -32,
        0,
        false,
        1,
        0,
        false,
        1
    ),
    row!(
        64,
        SKI,
        "SKI-{155,2}",
        155,
        -64,
        -64,
        -155,
        true,
        1,
        0,
        false,
        102
    ),
    row!(
        64,
        SwissKnife,
        "SwissKnife-{64}",
        64,
        -64,
        -26,
        -26,
        false,
        2,
        0,
        true,
        193
    ),
    row!(
        64,
        TMA,
        "TMA-{106}",
        106,
        -64,
        -64,
        0,
        false,
        1,
        0,
        false,
        1
    ),
    row!(
        64,
        Tree,
        "Tree-{96,6}",
        96,
        -64,
        -43,
        0,
        false,
        1,
        2,
        false,
        295
    ),
    row!(96, BC, "BC-{96}", 96, -96, -96, 0, false, 2, 0, true, 161),
    row!(
        96,
        KA,
        "KA-{113,0.75}",
        113,
        -96,
        -12,
        0,
        false,
        1,
        0,
        false,
        5
    ),
    row!(
        96,
        Poulidor,
        "Poulidor-{114}",
        114,
        -96,
        -49,
        0,
        false,
        1,
        0,
        false,
        1
    ),
    row!(
        96,
        SKI,
        "SKI-{232,2}",
        232,
        -96,
        -96,
        -232,
        true,
        1,
        1,
        false,
        25
    ),
    row!(
        96,
        SwissKnife,
        "SwissKnife-{96}",
        96,
        -96,
        -39,
        -39,
        false,
        2,
        1,
        true,
        161,
        true
    ),
    row!(
        96,
        TMA,
        "TMA-{158}",
        158,
        -96,
        -96,
        0,
        false,
        1,
        0,
        false,
        1
    ),
    row!(
        96,
        Tree,
        "Tree-{144,6}",
        144,
        -96,
        -64,
        0,
        false,
        1,
        3,
        false,
        223
    ),
    row!(128, BC, "BC-{128}", 128, -128, -128, 0, false, 2, 0, true, 129),
    row!(
        128,
        KA,
        "KA-{145,0.8}",
        145,
        -128,
        -12,
        0,
        false,
        1,
        0,
        false,
        4
    ),
    row!(
        128,
        Poulidor,
        "Poulidor-{148}",
        148,
        -128,
        -65,
        0,
        false,
        1,
        0,
        false,
        1
    ),
    row!(
        128,
        SKI,
        "SKI-{219,3}",
        219,
        -128,
        -90,
        -128,
        true,
        1,
        1,
        false,
        1
    ),
    row!(
        128,
        SwissKnife,
        "SwissKnife-{128}",
        128,
        -128,
        -53,
        -53,
        false,
        2,
        1,
        true,
        129
    ),
    row!(
        128,
        TMA,
        "TMA-{210}",
        210,
        -128,
        -128,
        0,
        false,
        1,
        1,
        false,
        1
    ),
    row!(
        128,
        Tree,
        "Tree-{160,16}",
        160,
        -128,
        -77,
        0,
        false,
        1,
        1280,
        false,
        150
    ),
];

/// Rows of one bound.
pub fn block(bound_exp: i32) -> Vec<GoldenRow> {
    TABLE
        .iter()
        .copied()
        .filter(|r| r.bound_exp == bound_exp)
        .collect()
}
