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

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace gpe::ptx {

// Dynamic-count buckets for the instruction mix. Every supported opcode maps
// to exactly one category.
enum class OpCategory {
  IntArith,
  FloatArith,
  SpecialFunc,
  Load,
  Store,
  Move,
  Convert,
  Compare,
  SetPred,
  Branch,
  Sync,
  Return,
  Other,
};

inline constexpr std::size_t kCategoryCount = 13;

const char* category_name(OpCategory category);
std::span<const OpCategory> all_categories();

// ---------------------------------------------------------------------------
// Tokens
// ---------------------------------------------------------------------------

enum class TokKind {
  Ident,      // add.s32, L_exit, sm_70
  Directive,  // .version, .reg, .param (leading dot kept in text)
  Reg,        // %r1, %tid.x
  IntLit,
  FloatLit,   // 0f3F800000, 0d..., 1.5
  Comma,
  Semi,
  Colon,
  LBrace,
  RBrace,
  LParen,
  RParen,
  LBracket,
  RBracket,
  Plus,
  Lt,
  Gt,
  Guard,  // @ or @! ; negation recorded in `negated`
  End,
};

struct Token {
  TokKind kind = TokKind::End;
  std::string text;
  int line = 0;
  int col = 0;
  bool negated = false;  // Guard only
};

// Strips // and /* */ comments; tokens carry line/column. Throws
// Errc::LexError on an illegal character or unterminated block comment.
std::vector<Token> tokenize(std::string_view source);

// ---------------------------------------------------------------------------
// Program representation
// ---------------------------------------------------------------------------

// Immediates keep the exact source spelling so reports stay lossless.
struct Immediate {
  std::string text;
  bool is_float = false;
  std::int64_t ival = 0;
  double fval = 0.0;

  bool operator==(const Immediate&) const = default;
};

enum class StateSpace { Global, Shared, Local, Param };

const char* state_space_name(StateSpace space);

struct RegisterRef {
  std::string name;
  bool operator==(const RegisterRef&) const = default;
};

struct ParamRef {
  std::string name;
  bool operator==(const ParamRef&) const = default;
};

// %tid.{x,y,z}, %ntid.{x,y,z}, %ctaid.{x,y,z}, %nctaid.{x,y,z}
struct SpecialReg {
  std::string name;
  bool operator==(const SpecialReg&) const = default;
};

struct LabelRef {
  std::string name;
  bool operator==(const LabelRef&) const = default;
};

// [base + offset]; base is a register or (for ld.param) a parameter name.
struct MemRef {
  std::string base;
  bool base_is_param = false;
  std::int64_t offset = 0;
  StateSpace space = StateSpace::Global;
  bool operator==(const MemRef&) const = default;
};

// {%f1, %f2} destination/source of vector memory ops (ld.v2 / st.v4 ...).
struct VectorRef {
  std::vector<std::string> regs;
  bool operator==(const VectorRef&) const = default;
};

using Operand = std::variant<RegisterRef, Immediate, ParamRef, SpecialReg, MemRef, LabelRef, VectorRef>;

struct Instruction {
  int index = 0;                        // ordinal in kernel body
  std::optional<std::string> guard;     // predicate register, e.g. "%p1"
  bool guard_negated = false;           // @!%p vs @%p
  std::string opcode;                   // mnemonic head, e.g. "add"
  std::vector<std::string> modifiers;   // full ordered suffix list, e.g. {"lo","s32"}
  std::string dtype;                    // derived operand scalar kind ("" when none)
  std::optional<Operand> dst;
  std::vector<Operand> srcs;
  OpCategory category = OpCategory::Other;
  int line = 0;

  bool operator==(const Instruction&) const = default;
};

struct ParamDecl {
  std::string name;
  std::string kind;  // u64, s32, f32, ...
  int byte_width = 0;
  bool operator==(const ParamDecl&) const = default;
};

// .reg .f32 %f<10>;  → kind "f32", name "%f", count 10, parameterized.
// .reg .f32 %acc;    → count 1, not parameterized.
struct RegDecl {
  std::string kind;
  std::string name;
  int count = 1;
  bool parameterized = false;
  bool operator==(const RegDecl&) const = default;
};

struct KernelDef {
  std::string name;
  std::vector<ParamDecl> params;
  std::vector<RegDecl> registers;
  std::vector<Instruction> body;
  std::map<std::string, int> labels;  // label name → index of the instruction it precedes
  int line = 0;

  bool operator==(const KernelDef&) const = default;
};

struct PtxProgram {
  std::string version;
  std::string target;
  std::vector<KernelDef> kernels;
  std::vector<std::string> warnings;  // skipped directives, lenient-mode opcodes

  const KernelDef& kernel(std::string_view name) const;  // Errc::InvalidArgument if absent
};

struct ParseOptions {
  // With strict_opcodes an unsupported mnemonic is a hard UnknownOpcode
  // error; otherwise it is categorized Other and a warning is recorded.
  bool strict_opcodes = false;
};

PtxProgram parse(std::string_view source, const ParseOptions& options = {});

// Category table lookup. Pure function of (opcode, modifiers); throws
// Errc::UnknownOpcode for mnemonics outside the supported set.
OpCategory classify(std::string_view opcode, std::span<const std::string> modifiers);
OpCategory classify_lenient(std::string_view opcode, std::span<const std::string> modifiers) noexcept;

// Supported mnemonic heads, for the classification-totality check.
std::span<const std::string_view> supported_opcodes();

// Regenerates PTX text that reparses to a structurally equal program.
std::string pretty_print(const PtxProgram& program);

// Stable-field-name JSON (see README for the schema).
std::string to_json(const PtxProgram& program, int indent = 2);

}  // namespace gpe::ptx
