/*
 * Copyright (c) 2026, the gpe authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <algorithm>
#include <array>
#include <cstdlib>
#include <cstring>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "gpe/error.hpp"
#include "gpe/ptx.hpp"

namespace gpe::ptx {

namespace {

constexpr std::array<OpCategory, kCategoryCount> kAllCategories = {
    OpCategory::IntArith, OpCategory::FloatArith, OpCategory::SpecialFunc,
    OpCategory::Load,     OpCategory::Store,      OpCategory::Move,
    OpCategory::Convert,  OpCategory::Compare,    OpCategory::SetPred,
    OpCategory::Branch,   OpCategory::Sync,       OpCategory::Return,
    OpCategory::Other};

constexpr std::array<std::string_view, 35> kSupportedOpcodes = {
    "add", "sub", "mul", "mad", "fma", "div", "rem", "min",  "max",  "abs", "neg",
    "and", "or",  "xor", "not", "shl", "shr", "sqrt", "rsqrt", "sin", "cos",
    "lg2", "ex2", "ld",  "st",  "mov", "cvt", "cvta", "setp", "set",  "selp",
    "bra", "bar", "ret", "exit"};

bool is_type_suffix(std::string_view mod) {
  static const std::unordered_set<std::string_view> kTypes = {
      "pred", "s8", "s16", "s32", "s64", "u8", "u16", "u32", "u64",
      "b8",   "b16", "b32", "b64", "f16", "f32", "f64"};
  return kTypes.count(mod) > 0;
}

bool is_float_type(std::string_view mod) {
  return mod == "f16" || mod == "f32" || mod == "f64";
}

bool contains_float_type(std::span<const std::string> mods) {
  return std::any_of(mods.begin(), mods.end(),
                     [](const std::string& m) { return is_float_type(m); });
}

bool is_special_reg_name(std::string_view name) {
  static const std::unordered_set<std::string_view> kSpecials = {
      "%tid.x",    "%tid.y",    "%tid.z",    "%ntid.x",   "%ntid.y",   "%ntid.z",
      "%ctaid.x",  "%ctaid.y",  "%ctaid.z",  "%nctaid.x", "%nctaid.y", "%nctaid.z"};
  return kSpecials.count(name) > 0;
}

int param_byte_width(std::string_view kind, int line) {
  if (kind == "u8" || kind == "s8" || kind == "b8") return 1;
  if (kind == "u16" || kind == "s16" || kind == "b16" || kind == "f16") return 2;
  if (kind == "u32" || kind == "s32" || kind == "b32" || kind == "f32") return 4;
  if (kind == "u64" || kind == "s64" || kind == "b64" || kind == "f64") return 8;
  throw Error(Errc::ParseError, "line " + std::to_string(line) +
                                    ": unsupported parameter kind '." + std::string(kind) + "'");
}

std::int64_t parse_int_literal(const std::string& text) {
  return std::strtoll(text.c_str(), nullptr, 0);
}

double parse_float_literal(const std::string& text) {
  std::string_view sv = text;
  bool neg = false;
  if (!sv.empty() && sv.front() == '-') {
    neg = true;
    sv.remove_prefix(1);
  }
  double value = 0.0;
  if (sv.size() > 2 && sv[0] == '0' && (sv[1] == 'f' || sv[1] == 'F')) {
    std::uint32_t bits = static_cast<std::uint32_t>(
        std::strtoull(std::string(sv.substr(2)).c_str(), nullptr, 16));
    float f;
    std::memcpy(&f, &bits, sizeof f);
    value = static_cast<double>(f);
  } else if (sv.size() > 2 && sv[0] == '0' && (sv[1] == 'd' || sv[1] == 'D')) {
    std::uint64_t bits = std::strtoull(std::string(sv.substr(2)).c_str(), nullptr, 16);
    double d;
    std::memcpy(&d, &bits, sizeof d);
    value = d;
  } else {
    value = std::strtod(text.c_str(), nullptr);
    return value;  // sign already in the text
  }
  return neg ? -value : value;
}

struct Cursor {
  const std::vector<Token>& toks;
  std::size_t pos = 0;

  const Token& peek(std::size_t off = 0) const {
    static const Token kEnd{TokKind::End, "", 0, 0, false};
    return pos + off < toks.size() ? toks[pos + off] : kEnd;
  }
  bool at_end() const { return pos >= toks.size(); }
  const Token& next() {
    const Token& t = peek();
    if (pos < toks.size()) ++pos;
    return t;
  }
  const Token& expect(TokKind kind, const char* what) {
    const Token& t = peek();
    if (t.kind != kind) {
      throw Error(Errc::ParseError, "line " + std::to_string(t.line) + ": expected " + what +
                                        ", found '" + (t.kind == TokKind::End ? "<eof>" : t.text) +
                                        "'");
    }
    return next();
  }
};

class Parser {
public:
  Parser(const std::vector<Token>& tokens, const ParseOptions& options)
      : cur_{tokens}, options_(options) {}

  PtxProgram run() {
    while (!cur_.at_end()) {
      const Token& t = cur_.peek();
      if (t.kind != TokKind::Directive) {
        throw Error(Errc::ParseError, "line " + std::to_string(t.line) +
                                          ": expected directive or kernel, found '" + t.text + "'");
      }
      if (t.text == ".version") {
        cur_.next();
        const Token& v = cur_.peek();
        if (v.kind != TokKind::FloatLit && v.kind != TokKind::IntLit) {
          throw Error(Errc::ParseError,
                      "line " + std::to_string(v.line) + ": expected version number");
        }
        program_.version = v.text;
        cur_.next();
      } else if (t.text == ".target") {
        cur_.next();
        program_.target = cur_.expect(TokKind::Ident, "target architecture").text;
        while (cur_.peek().kind == TokKind::Comma) {  // e.g. ", texmode_independent"
          cur_.next();
          cur_.expect(TokKind::Ident, "target option");
        }
      } else if (t.text == ".address_size") {
        cur_.next();
        cur_.expect(TokKind::IntLit, "address size");
      } else if (t.text == ".visible" || t.text == ".weak" || t.text == ".entry") {
        parse_kernel();
      } else {
        skip_directive();
      }
    }

    std::set<std::string> names;
    for (const KernelDef& k : program_.kernels) {
      if (!names.insert(k.name).second) {
        throw Error(Errc::ParseError, "duplicate kernel name '" + k.name + "'");
      }
    }
    return std::move(program_);
  }

private:
  // Consumes one unsupported directive: everything up to the terminating ';'
  // at brace depth zero, or a balanced '{...}' block. Never drops
  // instructions, since instructions only occur inside kernels we do parse.
  void skip_directive() {
    const Token& head = cur_.next();
    program_.warnings.push_back("skipped unsupported directive '" + head.text + "' at line " +
                                std::to_string(head.line));
    int depth = 0;
    while (!cur_.at_end()) {
      const Token& t = cur_.next();
      if (t.kind == TokKind::LBrace) ++depth;
      if (t.kind == TokKind::RBrace) {
        --depth;
        if (depth == 0) return;
      }
      if (t.kind == TokKind::Semi && depth == 0) return;
    }
  }

  void parse_kernel() {
    KernelDef kernel;
    if (cur_.peek().kind == TokKind::Directive &&
        (cur_.peek().text == ".visible" || cur_.peek().text == ".weak")) {
      cur_.next();
    }
    const Token& entry = cur_.peek();
    if (entry.kind != TokKind::Directive || entry.text != ".entry") {
      throw Error(Errc::ParseError,
                  "line " + std::to_string(entry.line) + ": expected .entry after linkage");
    }
    cur_.next();
    const Token& name = cur_.expect(TokKind::Ident, "kernel name");
    kernel.name = name.text;
    kernel.line = name.line;

    if (cur_.peek().kind == TokKind::LParen) {
      cur_.next();
      while (cur_.peek().kind != TokKind::RParen) {
        const Token& p = cur_.expect(TokKind::Directive, ".param");
        if (p.text != ".param") {
          throw Error(Errc::ParseError,
                      "line " + std::to_string(p.line) + ": expected .param, found '" + p.text + "'");
        }
        const Token& kind = cur_.expect(TokKind::Directive, "parameter type");
        const Token& pname = cur_.expect(TokKind::Ident, "parameter name");
        std::string kind_text = kind.text.substr(1);
        kernel.params.push_back(
            ParamDecl{pname.text, kind_text, param_byte_width(kind_text, kind.line)});
        if (cur_.peek().kind == TokKind::Comma) cur_.next();
      }
      cur_.expect(TokKind::RParen, "')'");
    }

    cur_.expect(TokKind::LBrace, "'{'");
    parse_body(kernel);
    validate_kernel(kernel);
    program_.kernels.push_back(std::move(kernel));
  }

  void parse_body(KernelDef& kernel) {
    while (true) {
      const Token& t = cur_.peek();
      if (t.kind == TokKind::End) {
        throw Error(Errc::ParseError, "unexpected end of input inside kernel '" + kernel.name + "'");
      }
      if (t.kind == TokKind::RBrace) {
        cur_.next();
        break;
      }
      if (t.kind == TokKind::Directive) {
        if (t.text == ".reg") {
          parse_reg_decl(kernel);
        } else {
          skip_directive();
        }
        continue;
      }
      if (t.kind == TokKind::Ident && cur_.peek(1).kind == TokKind::Colon) {
        if (kernel.labels.count(t.text)) {
          throw Error(Errc::ParseError,
                      "line " + std::to_string(t.line) + ": duplicate label '" + t.text + "'");
        }
        kernel.labels[t.text] = static_cast<int>(kernel.body.size());
        cur_.next();
        cur_.next();
        continue;
      }
      parse_instruction(kernel);
    }

    for (const auto& [label, index] : kernel.labels) {
      if (index >= static_cast<int>(kernel.body.size())) {
        throw Error(Errc::ParseError, "label '" + label + "' in kernel '" + kernel.name +
                                          "' is not followed by an instruction");
      }
    }
  }

  void parse_reg_decl(KernelDef& kernel) {
    cur_.next();  // .reg
    const Token& kind = cur_.expect(TokKind::Directive, "register type");
    std::string kind_text = kind.text.substr(1);
    while (true) {
      const Token& reg = cur_.expect(TokKind::Reg, "register name");
      RegDecl decl;
      decl.kind = kind_text;
      decl.name = reg.text;
      if (cur_.peek().kind == TokKind::Lt) {
        cur_.next();
        const Token& count = cur_.expect(TokKind::IntLit, "register count");
        decl.count = static_cast<int>(parse_int_literal(count.text));
        decl.parameterized = true;
        if (decl.count < 1) {
          throw Error(Errc::ParseError,
                      "line " + std::to_string(count.line) + ": register count must be >= 1");
        }
        cur_.expect(TokKind::Gt, "'>'");
      }
      kernel.registers.push_back(std::move(decl));
      if (cur_.peek().kind == TokKind::Comma) {
        cur_.next();
        continue;
      }
      break;
    }
    cur_.expect(TokKind::Semi, "';'");
  }

  Operand parse_operand(const KernelDef& kernel, const std::string& opcode, int line) {
    const Token& t = cur_.peek();
    switch (t.kind) {
      case TokKind::Reg: {
        cur_.next();
        if (is_special_reg_name(t.text)) return SpecialReg{t.text};
        return RegisterRef{t.text};
      }
      case TokKind::IntLit: {
        cur_.next();
        Immediate imm;
        imm.text = t.text;
        imm.is_float = false;
        imm.ival = parse_int_literal(t.text);
        imm.fval = static_cast<double>(imm.ival);
        return imm;
      }
      case TokKind::FloatLit: {
        cur_.next();
        Immediate imm;
        imm.text = t.text;
        imm.is_float = true;
        imm.fval = parse_float_literal(t.text);
        imm.ival = static_cast<std::int64_t>(imm.fval);
        return imm;
      }
      case TokKind::Ident: {
        cur_.next();
        if (opcode == "bra") return LabelRef{t.text};
        if (!has_param(kernel, t.text)) {
          throw Error(Errc::ParseError, "line " + std::to_string(t.line) +
                                            ": unknown identifier '" + t.text +
                                            "' (not a kernel parameter)");
        }
        return ParamRef{t.text};
      }
      case TokKind::LBracket: {
        cur_.next();
        MemRef mem;
        const Token& base = cur_.peek();
        if (base.kind == TokKind::Reg) {
          cur_.next();
          mem.base = base.text;
          mem.base_is_param = false;
        } else if (base.kind == TokKind::Ident) {
          cur_.next();
          if (!has_param(kernel, base.text)) {
            throw Error(Errc::ParseError, "line " + std::to_string(base.line) +
                                              ": address base '" + base.text +
                                              "' is not a kernel parameter");
          }
          mem.base = base.text;
          mem.base_is_param = true;
        } else {
          throw Error(Errc::ParseError,
                      "line " + std::to_string(base.line) + ": expected address base");
        }
        if (cur_.peek().kind == TokKind::Plus) {
          cur_.next();
          const Token& off = cur_.expect(TokKind::IntLit, "address offset");
          mem.offset = parse_int_literal(off.text);
        }
        cur_.expect(TokKind::RBracket, "']'");
        return mem;
      }
      case TokKind::LBrace: {
        cur_.next();
        VectorRef vec;
        while (true) {
          const Token& reg = cur_.expect(TokKind::Reg, "vector element register");
          vec.regs.push_back(reg.text);
          if (cur_.peek().kind == TokKind::Comma) {
            cur_.next();
            continue;
          }
          break;
        }
        cur_.expect(TokKind::RBrace, "'}'");
        return vec;
      }
      default:
        throw Error(Errc::ParseError, "line " + std::to_string(line > 0 ? t.line : t.line) +
                                          ": expected operand, found '" + t.text + "'");
    }
  }

  void parse_instruction(KernelDef& kernel) {
    Instruction instr;
    instr.index = static_cast<int>(kernel.body.size());

    if (cur_.peek().kind == TokKind::Guard) {
      const Token& g = cur_.next();
      const Token& reg = cur_.expect(TokKind::Reg, "guard predicate register");
      instr.guard = reg.text;
      instr.guard_negated = g.negated;
    }

    const Token& mnem = cur_.expect(TokKind::Ident, "instruction mnemonic");
    instr.line = mnem.line;

    // Split "add.lo.s32" into opcode head + ordered modifier list.
    std::string_view text = mnem.text;
    std::size_t dot = text.find('.');
    instr.opcode = std::string(text.substr(0, dot));
    while (dot != std::string_view::npos) {
      std::size_t next_dot = text.find('.', dot + 1);
      instr.modifiers.emplace_back(text.substr(dot + 1, next_dot - dot - 1));
      dot = next_dot;
    }
    for (const std::string& mod : instr.modifiers) {
      if (is_type_suffix(mod)) {
        instr.dtype = mod;  // first type suffix: the result kind (cvt dst leads)
        break;
      }
    }

    if (options_.strict_opcodes) {
      instr.category = classify(instr.opcode, instr.modifiers);
    } else {
      instr.category = classify_lenient(instr.opcode, instr.modifiers);
      if (instr.category == OpCategory::Other) {
        program_.warnings.push_back("line " + std::to_string(mnem.line) + ": unknown opcode '" +
                                    mnem.text + "' categorized as Other");
      }
    }

    std::vector<Operand> operands;
    if (cur_.peek().kind != TokKind::Semi) {
      while (true) {
        operands.push_back(parse_operand(kernel, instr.opcode, mnem.line));
        if (cur_.peek().kind == TokKind::Comma) {
          cur_.next();
          continue;
        }
        break;
      }
    }
    cur_.expect(TokKind::Semi, "';'");

    // Fill state space on memory operands from the instruction modifiers.
    StateSpace space = StateSpace::Global;
    for (const std::string& mod : instr.modifiers) {
      if (mod == "global") space = StateSpace::Global;
      else if (mod == "shared") space = StateSpace::Shared;
      else if (mod == "local") space = StateSpace::Local;
      else if (mod == "param") space = StateSpace::Param;
    }
    for (Operand& op : operands) {
      if (auto* mem = std::get_if<MemRef>(&op)) mem->space = space;
    }

    const std::string& opc = instr.opcode;
    if (opc == "bra") {
      if (operands.size() != 1 || !std::holds_alternative<LabelRef>(operands[0])) {
        throw Error(Errc::ParseError, "line " + std::to_string(mnem.line) +
                                          ": bra requires exactly one label operand");
      }
      instr.srcs = std::move(operands);
    } else if (opc == "ret" || opc == "exit" || opc == "bar") {
      instr.srcs = std::move(operands);
    } else if (opc == "st") {
      if (operands.empty() || !std::holds_alternative<MemRef>(operands[0])) {
        throw Error(Errc::ParseError,
                    "line " + std::to_string(mnem.line) + ": st requires an address destination");
      }
      instr.dst = std::move(operands[0]);
      instr.srcs.assign(std::make_move_iterator(operands.begin() + 1),
                        std::make_move_iterator(operands.end()));
    } else if (!operands.empty()) {
      instr.dst = std::move(operands[0]);
      instr.srcs.assign(std::make_move_iterator(operands.begin() + 1),
                        std::make_move_iterator(operands.end()));
    }

    kernel.body.push_back(std::move(instr));
  }

  static bool has_param(const KernelDef& kernel, const std::string& name) {
    return std::any_of(kernel.params.begin(), kernel.params.end(),
                       [&](const ParamDecl& p) { return p.name == name; });
  }

  void check_register(const KernelDef& kernel, const std::string& name, int line) const {
    for (const RegDecl& decl : kernel.registers) {
      if (!decl.parameterized) {
        if (decl.name == name) return;
        continue;
      }
      if (name.size() > decl.name.size() && name.compare(0, decl.name.size(), decl.name) == 0) {
        std::string_view tail = std::string_view(name).substr(decl.name.size());
        if (std::all_of(tail.begin(), tail.end(),
                        [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
          int index = std::atoi(std::string(tail).c_str());
          if (index < decl.count) return;
          throw Error(Errc::ParseError, "line " + std::to_string(line) + ": register '" + name +
                                            "' exceeds declared count " +
                                            std::to_string(decl.count) + " of class '" +
                                            decl.name + "'");
        }
      }
    }
    throw Error(Errc::ParseError,
                "line " + std::to_string(line) + ": undeclared register '" + name + "'");
  }

  void validate_kernel(const KernelDef& kernel) const {
    for (const Instruction& instr : kernel.body) {
      if (instr.guard) check_register(kernel, *instr.guard, instr.line);
      auto check_operand = [&](const Operand& op) {
        if (const auto* reg = std::get_if<RegisterRef>(&op)) {
          check_register(kernel, reg->name, instr.line);
        } else if (const auto* mem = std::get_if<MemRef>(&op)) {
          if (!mem->base_is_param) check_register(kernel, mem->base, instr.line);
        } else if (const auto* vec = std::get_if<VectorRef>(&op)) {
          for (const std::string& reg : vec->regs) check_register(kernel, reg, instr.line);
        } else if (const auto* label = std::get_if<LabelRef>(&op)) {
          if (!kernel.labels.count(label->name)) {
            throw Error(Errc::UnresolvedLabel, "kernel '" + kernel.name + "': branch at line " +
                                                   std::to_string(instr.line) +
                                                   " targets missing label '" + label->name + "'");
          }
        }
      };
      if (instr.dst) check_operand(*instr.dst);
      for (const Operand& op : instr.srcs) check_operand(op);
    }
  }

  Cursor cur_;
  ParseOptions options_;
  PtxProgram program_;
};

}  // namespace

const char* category_name(OpCategory category) {
  switch (category) {
    case OpCategory::IntArith: return "IntArith";
    case OpCategory::FloatArith: return "FloatArith";
    case OpCategory::SpecialFunc: return "SpecialFunc";
    case OpCategory::Load: return "Load";
    case OpCategory::Store: return "Store";
    case OpCategory::Move: return "Move";
    case OpCategory::Convert: return "Convert";
    case OpCategory::Compare: return "Compare";
    case OpCategory::SetPred: return "SetPred";
    case OpCategory::Branch: return "Branch";
    case OpCategory::Sync: return "Sync";
    case OpCategory::Return: return "Return";
    case OpCategory::Other: return "Other";
  }
  return "Other";
}

std::span<const OpCategory> all_categories() { return kAllCategories; }

const char* state_space_name(StateSpace space) {
  switch (space) {
    case StateSpace::Global: return "global";
    case StateSpace::Shared: return "shared";
    case StateSpace::Local: return "local";
    case StateSpace::Param: return "param";
  }
  return "global";
}

std::span<const std::string_view> supported_opcodes() { return kSupportedOpcodes; }

OpCategory classify(std::string_view opcode, std::span<const std::string> modifiers) {
  if (opcode == "ld") return OpCategory::Load;
  if (opcode == "st") return OpCategory::Store;
  if (opcode == "mov") return OpCategory::Move;
  if (opcode == "cvt" || opcode == "cvta") return OpCategory::Convert;
  if (opcode == "setp") return OpCategory::SetPred;
  if (opcode == "set" || opcode == "selp") return OpCategory::Compare;
  if (opcode == "bra") return OpCategory::Branch;
  if (opcode == "bar") return OpCategory::Sync;
  if (opcode == "ret" || opcode == "exit") return OpCategory::Return;
  if (opcode == "sqrt" || opcode == "rsqrt" || opcode == "sin" || opcode == "cos" ||
      opcode == "lg2" || opcode == "ex2") {
    return OpCategory::SpecialFunc;
  }
  static const std::unordered_set<std::string_view> kArith = {
      "add", "sub", "mul", "mad", "fma", "div", "rem", "min", "max", "abs", "neg",
      "and", "or",  "xor", "not", "shl", "shr"};
  if (kArith.count(opcode)) {
    return contains_float_type(modifiers) ? OpCategory::FloatArith : OpCategory::IntArith;
  }
  throw Error(Errc::UnknownOpcode, std::string(opcode));
}

OpCategory classify_lenient(std::string_view opcode,
                            std::span<const std::string> modifiers) noexcept {
  try {
    return classify(opcode, modifiers);
  } catch (const Error&) {
    return OpCategory::Other;
  }
}

const KernelDef& PtxProgram::kernel(std::string_view name) const {
  for (const KernelDef& k : kernels) {
    if (k.name == name) return k;
  }
  std::string available;
  for (const KernelDef& k : kernels) {
    if (!available.empty()) available += ", ";
    available += k.name;
  }
  throw Error(Errc::InvalidArgument, "no kernel named '" + std::string(name) +
                                         "' (available: " + (available.empty() ? "none" : available) +
                                         ")");
}

PtxProgram parse(std::string_view source, const ParseOptions& options) {
  std::vector<Token> tokens = tokenize(source);
  return Parser(tokens, options).run();
}

}  // namespace gpe::ptx
