//! Small games shared by unit tests.

use crate::game::{parse_pgsolver, ParityGame};

/// Nodes A..E.
pub(crate) const FIVE_NODE: &str = "parity 4;\n0 1 1 1,3 \"A\";\n1 1 0 0 \"B\";\n2 3 0 1,3,4 \"C\";\n\
                               3 4 0 4 \"D\";\n4 2 1 2 \"E\";\n";

/// Nodes A..I; every Odd node has a single successor. Base nodes C, H, E, D.
pub(crate) const NINE_NODE: &str = "parity 8;\n0 1 0 1,5 \"A\";\n1 1 1 2 \"B\";\n2 2 0 0,7 \"C\";\n\
                               3 4 1 1 \"D\";\n4 4 0 6,8 \"E\";\n5 3 0 0,3 \"F\";\n6 5 1 5 \"G\";\n\
                               7 4 1 4 \"H\";\n8 2 1 0 \"I\";\n";

pub(crate) fn game(text: &str) -> ParityGame {
    parse_pgsolver(text).unwrap()
}
