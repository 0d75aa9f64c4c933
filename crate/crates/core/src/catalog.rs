//! Built-in problems: independent set, dominating set, vertex coloring,
//! domatic partition and sloppy coloring.

use crate::problem::OptLcl;
use crate::scalar::Scalar;

pub const MAX_INDEPENDENT_SET: &str = "\
# 1 marks nodes in the independent set
alphabet: 0 1
radius: 1
objective: max
aggregation: sum
cost 0 0 = 0
cost 0 1 = 0
cost 1 0 = 1
cost 1 1 = bot
";

pub const MIN_DOMINATING_SET: &str = "\
# 1 marks nodes in the dominating set; a 0 must see a 1 on one side
alphabet: 0 1
radius: 2
objective: min
aggregation: sum
cost 0 0 0 = bot
cost 0 0 1 = 0
cost 0 1 0 = 0
cost 0 1 1 = 0
cost 1 0 0 = 1
cost 1 0 1 = 1
cost 1 1 0 = 1
cost 1 1 1 = 1
";

pub const MIN_VERTEX_COLORING: &str = "\
# the cost of a node is its own color; adjacent colors must differ
alphabet: 1 2 3
radius: 1
objective: min
aggregation: max
cost 1 1 = bot
cost 1 2 = 1
cost 1 3 = 1
cost 2 1 = 2
cost 2 2 = bot
cost 2 3 = 2
cost 3 1 = 3
cost 3 2 = 3
cost 3 3 = bot
";

pub const MAX_DOMATIC_PARTITION: &str = "\
# label x_i: member of dominating set x in a partition into i sets
alphabet: a1 a2 b2 a3 b3 c3
radius: 2
objective: max
aggregation: min
default = bot
cost a1 a1 a1 = 1
cost a2 a2 b2 = 2
cost a2 b2 a2 = 2
cost a2 b2 b2 = 2
cost b2 a2 a2 = 2
cost b2 a2 b2 = 2
cost b2 b2 a2 = 2
cost a3 b3 c3 = 3
cost b3 c3 a3 = 3
cost c3 a3 b3 = 3
cost a3 c3 b3 = 3
cost c3 b3 a3 = 3
cost b3 a3 c3 = 3
";

pub const SLOPPY_COLORING: &str = "\
# proper 2-coloring {b,w}, proper 3-coloring {1,2,3}, or a sloppy
# 3-coloring {a,b',c} where the monochromatic pair aa is allowed at a price
alphabet: b w 1 2 3 a b' c
radius: 1
objective: min
aggregation: sum
default = bot
cost b w = 1
cost w b = 1
cost 1 2 = 2
cost 2 1 = 2
cost 2 3 = 2
cost 3 2 = 2
cost 1 3 = 2
cost 3 1 = 2
cost a b' = 3
cost b' a = 3
cost b' c = 3
cost c b' = 3
cost a c = 3
cost c a = 3
cost a a = 100
";

/// Catalog names, in presentation order.
pub const NAMES: [&str; 5] = [
    "max-independent-set",
    "min-dominating-set",
    "min-vertex-coloring",
    "max-domatic-partition",
    "sloppy-coloring",
];

/// Problem-file text of a catalog entry.
pub fn source(name: &str) -> Option<&'static str> {
    Some(match name {
        "max-independent-set" => MAX_INDEPENDENT_SET,
        "min-dominating-set" => MIN_DOMINATING_SET,
        "min-vertex-coloring" => MIN_VERTEX_COLORING,
        "max-domatic-partition" => MAX_DOMATIC_PARTITION,
        "sloppy-coloring" => SLOPPY_COLORING,
        _ => return None,
    })
}

pub fn example<S: Scalar>(name: &str) -> Option<OptLcl<S>> {
    source(name).map(|text| OptLcl::parse(text).expect("catalog entries parse"))
}

pub fn builtin_examples<S: Scalar>() -> Vec<(&'static str, OptLcl<S>)> {
    NAMES.iter().map(|&name| (name, example(name).unwrap())).collect()
}
