//! The worked examples as ready-made machines.

use crate::text::Workspace;
use crate::transducer::Transducer;

pub const EXAMPLE1: &str = include_str!("../fixtures/example1.ttc");
pub const COPYING: &str = include_str!("../fixtures/copying.ttc");
pub const DELETING: &str = include_str!("../fixtures/deleting.ttc");
pub const EXAMPLE3: &str = include_str!("../fixtures/example3.ttc");
pub const EXAMPLE4: &str = include_str!("../fixtures/example4.ttc");

/// Every fixture source with its file name.
pub const ALL: [(&str, &str); 5] = [
    ("example1.ttc", EXAMPLE1),
    ("copying.ttc", COPYING),
    ("deleting.ttc", DELETING),
    ("example3.ttc", EXAMPLE3),
    ("example4.ttc", EXAMPLE4),
];

fn load(src: &str) -> Workspace {
    Workspace::parse(src).expect("fixture parses")
}

fn get(ws: &Workspace, name: &str) -> Transducer {
    ws.transducer(name).expect("fixture defines machine").clone()
}

/// All fixtures in one workspace.
pub fn workspace() -> Workspace {
    let mut ws = Workspace::new();
    for (_, src) in ALL {
        ws.extend(src).expect("fixture parses");
    }
    ws
}

/// The quadratic transducer with rules numbered 1 to 4.
pub fn example1() -> Transducer {
    get(&load(EXAMPLE1), "T")
}

/// The copying pair; the second stage reads one tree with two states.
pub fn copying() -> (Transducer, Transducer) {
    let ws = load(COPYING);
    (get(&ws, "copy1"), get(&ws, "copy2"))
}

/// The deleting pair; the first stage has an empty translation.
pub fn deleting() -> (Transducer, Transducer) {
    let ws = load(DELETING);
    (get(&ws, "del1"), get(&ws, "del2"))
}

pub fn example3() -> Transducer {
    get(&load(EXAMPLE3), "ex3")
}

pub fn example4() -> (Transducer, Transducer) {
    let ws = load(EXAMPLE4);
    (get(&ws, "ex4_t1"), get(&ws, "ex4_t2"))
}
