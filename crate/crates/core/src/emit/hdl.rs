//! Netlist of the evaluation datapath, printed as Verilog and simulated with
//! exact per-wire width checks.

use std::fmt::Write as _;

use super::{mask, HardwareDesign};
use crate::explore::SignClass;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Op {
    /// The module input `z`.
    Input,
    /// `src[lo + width - 1 : lo]`, reinterpreted per the node's signedness.
    Slice {
        src: usize,
        lo: u32,
    },
    /// `src` with its low `bits` bits cleared.
    ClearLow {
        src: usize,
        bits: u32,
    },
    /// LUT row addressed by `addr`, or the only row when `addr` is `None`.
    Lut {
        addr: Option<usize>,
    },
    Mul {
        lhs: usize,
        rhs: usize,
    },
    Shl {
        src: usize,
        by: u32,
    },
    Sar {
        src: usize,
        by: u32,
    },
    /// Signed sum; `true` marks a subtracted term.
    Sum {
        terms: Vec<(bool, usize)>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub name: String,
    pub width: u32,
    pub signed: bool,
    pub op: Op,
}

/// The datapath as a list of nodes in evaluation order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Netlist {
    pub nodes: Vec<Node>,
    pub rows: Vec<u128>,
    /// Node whose low `output_bits` bits drive the output port.
    pub result: usize,
    pub output_bits: u32,
}

/// A wire whose value does not fit its declared width.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimError {
    pub node: String,
    pub z: u64,
    pub value: i128,
}

impl std::fmt::Display for SimError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "wire {} overflows with value {} at z={}",
            self.node, self.value, self.z
        )
    }
}

impl std::error::Error for SimError {}

fn fits(v: i128, width: u32, signed: bool) -> bool {
    if signed {
        width > 0 && v >= -(1i128 << (width - 1)) && v < (1i128 << (width - 1))
    } else {
        v >= 0 && (width >= 127 || v < (1i128 << width))
    }
}

fn bits_for(max: u128) -> u32 {
    128 - max.leading_zeros()
}

struct Builder {
    nodes: Vec<Node>,
}

impl Builder {
    fn add(&mut self, name: &str, width: u32, signed: bool, op: Op) -> usize {
        self.nodes.push(Node {
            name: name.to_string(),
            width,
            signed,
            op,
        });
        self.nodes.len() - 1
    }

    fn width(&self, id: usize) -> u32 {
        self.nodes[id].width
    }

    fn signed(&self, id: usize) -> bool {
        self.nodes[id].signed
    }
}

/// Builds the datapath for a packed design.
///
/// Unsigned operands of signed operations are zero-extended by one bit, so
/// every declared width holds its wire's exact value.
pub fn netlist(hw: &HardwareDesign) -> Netlist {
    let mut b = Builder { nodes: Vec::new() };
    let mx = hw.offset_bits();
    let z = b.add("z", hw.input.width(), false, Op::Input);
    let addr = (hw.lookup_bits > 0)
        .then(|| b.add("r", hw.lookup_bits, false, Op::Slice { src: z, lo: mx }));
    let x = (mx > 0).then(|| b.add("x", mx, false, Op::Slice { src: z, lo: 0 }));
    let row = (hw.row_bits() > 0).then(|| b.add("row", hw.row_bits(), false, Op::Lut { addr }));

    let mut terms: Vec<(bool, usize)> = Vec::new();
    let layout = hw.field_layout();
    let plans = hw.plans.as_array();
    let names = ["a", "b", "c"];
    for idx in 0..3 {
        let plan = plans[idx];
        if plan.width == 0 {
            continue;
        }
        let mixed = plan.class == SignClass::Mixed;
        let row = row.expect("nonzero field implies a LUT");
        let (lo, bits) = layout[idx];
        let field = b.add(
            &format!("{}_f", names[idx]),
            bits,
            mixed,
            Op::Slice { src: row, lo },
        );
        let operand = match idx {
            0 => x.map(|x| {
                let xt = b.add(
                    "xt",
                    mx,
                    false,
                    Op::ClearLow {
                        src: x,
                        bits: hw.truncation.square,
                    },
                );
                b.add("sq", 2 * mx, false, Op::Mul { lhs: xt, rhs: xt })
            }),
            1 => x.map(|x| {
                b.add(
                    "xl",
                    mx,
                    false,
                    Op::ClearLow {
                        src: x,
                        bits: hw.truncation.linear,
                    },
                )
            }),
            _ => None,
        };
        let scaled = match operand {
            // x = 0 everywhere kills the term
            None if idx < 2 => continue,
            None => field,
            Some(op) => {
                let w = b.width(field) + b.width(op) + mixed as u32;
                b.add(
                    &format!("p{}", names[idx]),
                    w,
                    mixed,
                    Op::Mul {
                        lhs: field,
                        rhs: op,
                    },
                )
            }
        };
        let term = if plan.shift > 0 {
            let w = b.width(scaled) + plan.shift;
            let s = b.signed(scaled);
            b.add(
                &format!("t{}", names[idx]),
                w,
                s,
                Op::Shl {
                    src: scaled,
                    by: plan.shift,
                },
            )
        } else {
            scaled
        };
        terms.push((plan.class == SignClass::NonPositive, term));
    }

    let widest = terms
        .iter()
        .map(|&(_, t)| b.width(t) + !b.signed(t) as u32)
        .max()
        .unwrap_or(1);
    let sum_width = widest + bits_for(terms.len().max(1) as u128) + 1;
    let sum_width = sum_width.max(hw.datapath_output_bits() + hw.k + 1);
    let v = b.add("v", sum_width, true, Op::Sum { terms });
    let y = b.add("y_full", sum_width, true, Op::Sar { src: v, by: hw.k });
    Netlist {
        nodes: b.nodes,
        rows: hw.rows.clone(),
        result: y,
        output_bits: hw.datapath_output_bits(),
    }
}

impl Netlist {
    /// Output port value for input `z`, or the first wire that overflows.
    pub fn simulate(&self, z: u64) -> Result<u64, SimError> {
        let mut vals: Vec<i128> = Vec::with_capacity(self.nodes.len());
        for n in &self.nodes {
            let v = match &n.op {
                Op::Input => z as i128,
                Op::Slice { src, lo } => {
                    let raw = (vals[*src] as u128 >> lo) & mask(n.width);
                    if n.signed && n.width > 0 && raw >> (n.width - 1) & 1 == 1 {
                        raw as i128 - (1i128 << n.width)
                    } else {
                        raw as i128
                    }
                }
                Op::ClearLow { src, bits } => vals[*src] & !(mask(*bits) as i128),
                Op::Lut { addr } => self.rows[addr.map_or(0, |a| vals[a] as usize)] as i128,
                Op::Mul { lhs, rhs } => vals[*lhs] * vals[*rhs],
                Op::Shl { src, by } => vals[*src] << by,
                Op::Sar { src, by } => vals[*src] >> by,
                Op::Sum { terms } => terms
                    .iter()
                    .map(|&(neg, t)| if neg { -vals[t] } else { vals[t] })
                    .sum(),
            };
            if !fits(v, n.width, n.signed) {
                return Err(SimError {
                    node: n.name.clone(),
                    z,
                    value: v,
                });
            }
            vals.push(v);
        }
        Ok((vals[self.result] as u128 & mask(self.output_bits)) as u64)
    }

    /// Whether a squarer is instantiated.
    pub fn has_squarer(&self) -> bool {
        self.nodes.iter().any(|n| n.name == "sq")
    }
}

fn decl(n: &Node) -> String {
    let s = if n.signed { "signed " } else { "" };
    format!("{s}[{}:0] {}", n.width - 1, n.name)
}

/// Operand text inside a signed expression.
fn signed_operand(n: &Node) -> String {
    if n.signed {
        n.name.clone()
    } else {
        format!("$signed({{1'b0, {}}})", n.name)
    }
}

/// Combinational Verilog for the design.
pub fn emit_hdl(hw: &HardwareDesign, module: &str) -> String {
    let net = netlist(hw);
    let nodes = &net.nodes;
    let mut out = String::new();
    let [pa, pb, pc] = hw.plans.as_array();
    writeln!(out, "// {}", hw.width_report()).unwrap();
    writeln!(
        out,
        "// R={} k={} i={} j={} a:{}<<{} b:{}<<{} c:{}<<{}",
        hw.lookup_bits,
        hw.k,
        hw.truncation.square,
        hw.truncation.linear,
        pa.class,
        pa.shift,
        pb.class,
        pb.shift,
        pc.class,
        pc.shift
    )
    .unwrap();
    if hw.dropped_msbs.0 > 0 {
        writeln!(
            out,
            "// the {} output MSBs are constant {:#b} and not produced",
            hw.dropped_msbs.0, hw.dropped_msbs.1
        )
        .unwrap();
    }
    writeln!(out, "module {module} (").unwrap();
    writeln!(out, "    input  wire [{}:0] z,", hw.input.width() - 1).unwrap();
    writeln!(out, "    output wire [{}:0] y", net.output_bits.max(1) - 1).unwrap();
    writeln!(out, ");").unwrap();
    for n in nodes.iter().skip(1) {
        if let Op::Lut { addr } = &n.op {
            let digits = super::hex_digits(n.width);
            match addr {
                None => {
                    writeln!(
                        out,
                        "    wire {} = {}'h{:0digits$x};",
                        decl(n),
                        n.width,
                        net.rows[0]
                    )
                    .unwrap();
                }
                Some(a) => {
                    writeln!(out, "    reg  {};", decl(n)).unwrap();
                    let ab = nodes[*a].width;
                    writeln!(out, "    always @(*) begin").unwrap();
                    writeln!(out, "        case ({})", nodes[*a].name).unwrap();
                    for (r, row) in net.rows.iter().enumerate() {
                        writeln!(
                            out,
                            "            {ab}'d{r}: {} = {}'h{row:0digits$x};",
                            n.name, n.width
                        )
                        .unwrap();
                    }
                    writeln!(out, "            default: {} = {}'h0;", n.name, n.width).unwrap();
                    writeln!(out, "        endcase").unwrap();
                    writeln!(out, "    end").unwrap();
                }
            }
            continue;
        }
        let rhs = match &n.op {
            Op::Input | Op::Lut { .. } => unreachable!(),
            Op::Slice { src, lo } => format!("{}[{}:{}]", nodes[*src].name, lo + n.width - 1, lo),
            Op::ClearLow { src, bits } => {
                let s = &nodes[*src].name;
                if *bits == 0 {
                    s.clone()
                } else if *bits >= n.width {
                    format!("{}'d0", n.width)
                } else {
                    format!("{{{s}[{}:{bits}], {bits}'b0}}", n.width - 1)
                }
            }
            Op::Mul { lhs, rhs } => {
                if n.signed {
                    format!(
                        "{} * {}",
                        signed_operand(&nodes[*lhs]),
                        signed_operand(&nodes[*rhs])
                    )
                } else {
                    format!("{} * {}", nodes[*lhs].name, nodes[*rhs].name)
                }
            }
            Op::Shl { src, by } => {
                if n.signed {
                    format!("{} <<< {by}", nodes[*src].name)
                } else {
                    format!("{} << {by}", nodes[*src].name)
                }
            }
            Op::Sar { src, by } => format!("{} >>> {by}", nodes[*src].name),
            Op::Sum { terms } => {
                if terms.is_empty() {
                    format!("{}'sd0", n.width)
                } else {
                    let mut s = String::new();
                    for (i, &(neg, t)) in terms.iter().enumerate() {
                        let op = signed_operand(&nodes[t]);
                        match (i, neg) {
                            (0, false) => s.push_str(&op),
                            (0, true) => write!(s, "-{op}").unwrap(),
                            (_, false) => write!(s, " + {op}").unwrap(),
                            (_, true) => write!(s, " - {op}").unwrap(),
                        }
                    }
                    s
                }
            }
        };
        writeln!(out, "    wire {} = {rhs};", decl(n)).unwrap();
    }
    let result = &nodes[net.result].name;
    if net.output_bits == 0 {
        writeln!(out, "    assign y = 1'b0;").unwrap();
    } else {
        writeln!(out, "    assign y = {result}[{}:0];", net.output_bits - 1).unwrap();
    }
    writeln!(out, "endmodule").unwrap();
    out
}
