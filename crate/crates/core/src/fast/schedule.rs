use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::polar::PolarCode;
use crate::Result;

/// Which list decoder a schedule describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ListAlgorithm {
    Scl,
    Sscl,
    FastSscl,
}

impl ListAlgorithm {
    pub fn as_str(&self) -> &'static str {
        match self {
            ListAlgorithm::Scl => "scl",
            ListAlgorithm::Sscl => "sscl",
            ListAlgorithm::FastSscl => "fast_sscl",
        }
    }
}

impl std::str::FromStr for ListAlgorithm {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "scl" => Ok(ListAlgorithm::Scl),
            "sscl" => Ok(ListAlgorithm::Sscl),
            "fast_sscl" | "fast-sscl" => Ok(ListAlgorithm::FastSscl),
            other => Err(crate::Error::InvalidArgument(format!(
                "unknown list algorithm {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NodeClass {
    Rate0,
    Rate1,
    Rep,
    Spc,
    Other,
}

impl NodeClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            NodeClass::Rate0 => "rate0",
            NodeClass::Rate1 => "rate1",
            NodeClass::Rep => "rep",
            NodeClass::Spc => "spc",
            NodeClass::Other => "other",
        }
    }

    /// Class of the leaf range `frozen` taken on its own.
    pub fn of(frozen: &[bool]) -> NodeClass {
        let info = frozen.iter().filter(|&&f| !f).count();
        let len = frozen.len();
        if info == 0 {
            NodeClass::Rate0
        } else if info == len {
            NodeClass::Rate1
        } else if info == 1 && !frozen[len - 1] {
            NodeClass::Rep
        } else if info == len - 1 && frozen[0] {
            NodeClass::Spc
        } else {
            NodeClass::Other
        }
    }
}

/// A subtree handled as one unit by the decoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ScheduleNode {
    pub stage: u32,
    pub offset: usize,
    pub class: NodeClass,
    /// Time steps with unlimited processing elements.
    pub step_cost: u64,
}

impl ScheduleNode {
    pub fn len(&self) -> usize {
        1 << self.stage
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Offline decomposition of the decoding tree into the subtrees a decoder
/// processes as units, in decoding order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeSchedule {
    pub algorithm: ListAlgorithm,
    pub list_size: usize,
    pub stages: u32,
    pub nodes: Vec<ScheduleNode>,
}

/// Steps to traverse an unspecialized subtree of `2^stage` leaves: one step
/// per leaf and two per internal node, an internal node of width `w`
/// needing `ceil(w / pe)` steps for each of its two LLR computations.
pub fn other_node_cost(stage: u32, pe: usize) -> u64 {
    if stage == 0 {
        1
    } else {
        internal_cost(stage, pe) + 2 * other_node_cost(stage - 1, pe)
    }
}

fn internal_cost(stage: u32, pe: usize) -> u64 {
    let width = 1u64 << (stage - 1);
    2 * width.div_ceil(pe as u64)
}

fn special_cost(class: NodeClass, stage: u32, algorithm: ListAlgorithm, list_size: usize, pe: usize) -> u64 {
    let len = 1u64 << stage;
    match class {
        NodeClass::Rate0 => 1,
        NodeClass::Rep => 2,
        NodeClass::Rate1 => match algorithm {
            ListAlgorithm::FastSscl => {
                let splits = (list_size as u64 - 1).min(len);
                splits + u64::from(len > splits)
            }
            _ => len,
        },
        NodeClass::Spc | NodeClass::Other => other_node_cost(stage, pe),
    }
}

/// Greedy top-down classification. For [`ListAlgorithm::Scl`] every leaf is
/// its own `Other` node; otherwise the first Rate-0, Rate-1, Rep or SPC node
/// met on each branch becomes a unit. SPC nodes are recorded but traversed
/// leaf by leaf, so they carry the cost of an ordinary subtree.
pub fn classify_tree(code: &PolarCode, algorithm: ListAlgorithm, list_size: usize) -> NodeSchedule {
    let mut nodes = Vec::new();
    visit(code.frozen(), code.stages(), 0, algorithm, list_size, &mut nodes);
    NodeSchedule {
        algorithm,
        list_size,
        stages: code.stages(),
        nodes,
    }
}

fn visit(
    frozen: &[bool],
    stage: u32,
    offset: usize,
    algorithm: ListAlgorithm,
    list_size: usize,
    out: &mut Vec<ScheduleNode>,
) {
    let leaves = &frozen[offset..offset + (1 << stage)];
    let class = match algorithm {
        ListAlgorithm::Scl if stage == 0 => Some(NodeClass::Other),
        ListAlgorithm::Scl => None,
        _ => match NodeClass::of(leaves) {
            NodeClass::Other => None,
            class => Some(class),
        },
    };
    match class {
        Some(class) => out.push(ScheduleNode {
            stage,
            offset,
            class,
            step_cost: special_cost(class, stage, algorithm, list_size, usize::MAX),
        }),
        None => {
            let half = 1 << (stage - 1);
            visit(frozen, stage - 1, offset, algorithm, list_size, out);
            visit(frozen, stage - 1, offset + half, algorithm, list_size, out);
        }
    }
}

impl NodeSchedule {
    /// Total decoding time steps with `pe` processing elements.
    ///
    /// Each information-bit metric update includes its sort, so sorting
    /// adds no separate steps.
    pub fn count_steps(&self, pe: usize) -> u64 {
        assert!(pe >= 1, "at least one processing element");
        let mut nodes = self.nodes.iter().peekable();
        self.count_subtree(self.stages, 0, pe, &mut nodes)
    }

    fn count_subtree<'a>(
        &self,
        stage: u32,
        offset: usize,
        pe: usize,
        nodes: &mut std::iter::Peekable<std::slice::Iter<'a, ScheduleNode>>,
    ) -> u64 {
        match nodes.peek() {
            Some(node) if node.stage == stage && node.offset == offset => {
                let node = nodes.next().expect("peeked");
                special_cost(node.class, stage, self.algorithm, self.list_size, pe)
            }
            _ => {
                assert!(stage > 0, "schedule does not cover leaf {offset}");
                let half = 1 << (stage - 1);
                internal_cost(stage, pe)
                    + self.count_subtree(stage - 1, offset, pe, nodes)
                    + self.count_subtree(stage - 1, offset + half, pe, nodes)
            }
        }
    }

    /// Writes `stage,offset,class,step_cost` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(["stage", "offset", "class", "step_cost"])?;
        for node in &self.nodes {
            writer.write_record([
                node.stage.to_string(),
                node.offset.to_string(),
                node.class.as_str().to_string(),
                node.step_cost.to_string(),
            ])?;
        }
        writer.flush().map_err(|e| crate::Error::io("<schedule csv>", e))?;
        Ok(())
    }
}

/// Convenience wrapper: classify and count in one call.
pub fn count_steps(code: &PolarCode, algorithm: ListAlgorithm, list_size: usize, pe: usize) -> u64 {
    classify_tree(code, algorithm, list_size).count_steps(pe)
}
