//! The fixed operator table shared by the reader and the writer.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OpType {
    Xfx,
    Xfy,
    Yfx,
    Fy,
    Fx,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OpDef {
    pub priority: u32,
    pub kind: OpType,
}

impl OpDef {
    const fn new(priority: u32, kind: OpType) -> OpDef {
        OpDef { priority, kind }
    }

    /// Maximum priorities of the (left, right) operands.
    pub fn operand_limits(self) -> (u32, u32) {
        let p = self.priority;
        match self.kind {
            OpType::Xfx => (p - 1, p - 1),
            OpType::Xfy => (p - 1, p),
            OpType::Yfx => (p, p - 1),
            OpType::Fy => (0, p),
            OpType::Fx => (0, p - 1),
        }
    }
}

pub fn infix(name: &str) -> Option<OpDef> {
    use OpType::*;
    Some(match name {
        ":-" => OpDef::new(1200, Xfx),
        "," => OpDef::new(1000, Xfy),
        "=" | "\\=" | "==" | "\\==" | "is" | "=:=" | "=\\=" | "<" | ">" | "=<" | ">=" | "=>" => {
            OpDef::new(700, Xfx)
        }
        "+" | "-" => OpDef::new(500, Yfx),
        "*" | "/" | "mod" => OpDef::new(400, Yfx),
        _ => return None,
    })
}

pub fn prefix(name: &str) -> Option<OpDef> {
    match name {
        ":-" => Some(OpDef::new(1200, OpType::Fx)),
        "-" => Some(OpDef::new(200, OpType::Fy)),
        _ => None,
    }
}

pub fn is_operator(name: &str) -> bool {
    infix(name).is_some() || prefix(name).is_some()
}
