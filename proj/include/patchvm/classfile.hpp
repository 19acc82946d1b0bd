#pragma once

// Textual class format: types, parser, serializer and layout signatures.
//
//   class <Name> [extends <Name>] [instrumented] {
//     [static] [final] <type> <name> [= <literal>]
//     init { <instructions> }
//     [static] fn <name>(<n-params>) { <instructions> }
//   }
//
// Statements are separated by newlines or `;`. `//` starts a comment.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <variant>
#include <vector>

#include "patchvm/error.hpp"

namespace patchvm {

inline constexpr std::string_view kClinitName = "<clinit>";
inline constexpr std::string_view kRenamedClinitName = "uniapr_clinit";

enum class FieldType : std::uint8_t { Int, Float, Bool, String, Ref };
enum class MemberKind : std::uint8_t { Static, Instance };

std::string_view to_string(FieldType t);
std::optional<FieldType> field_type_from(std::string_view s);

/// Literal operand of `const` and constant-variable initializers.
using Literal = std::variant<std::monostate, std::int64_t, double, bool, std::string>;

std::string format_literal(const Literal& lit);

enum class Op : std::uint8_t {
    Const,
    Load,
    Store,
    GetStatic,
    PutStatic,
    GetField,
    PutField,
    New,
    InvokeStatic,
    InvokeVirtual,
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    Eq,
    Lt,
    Le,
    Not,
    Label,
    Jump,
    JumpIf,
    Return,
    ReturnVal,
    Assert,
    Throw,
    ListNew,
    ListGet,
    ListPut,
    ListLen,
    SysSet,
    SysGet,
    Emit,
    CrashVm,
    Guard,
};

std::string_view mnemonic(Op op);
std::optional<Op> op_from_mnemonic(std::string_view s);

/// True for the instructions that may trigger class initialization of `owner`
/// (`new`, `invokestatic`, `putstatic`, `getstatic`).
bool is_init_trigger(Op op);

struct Instruction {
    Op op = Op::Return;
    Literal literal;        // const
    std::int64_t index = 0; // load, store
    std::string owner;      // class operand: getstatic/putstatic/new/invokestatic/guard
    std::string member;     // field, method, label or throw message

    bool operator==(const Instruction&) const = default;
};

Instruction make_insn(Op op);
Instruction make_const(Literal lit);
Instruction make_local(Op op, std::int64_t index);
Instruction make_member(Op op, std::string owner, std::string member);
Instruction make_class_op(Op op, std::string owner);
Instruction make_named(Op op, std::string name);

struct FieldDef {
    std::string name;
    MemberKind kind = MemberKind::Static;
    FieldType type = FieldType::Int;
    bool is_final = false;
    std::optional<Literal> constant_value;

    bool is_static() const noexcept { return kind == MemberKind::Static; }
    bool is_constant() const noexcept { return constant_value.has_value(); }

    bool operator==(const FieldDef&) const = default;
};

struct MethodDef {
    std::string name;
    MemberKind kind = MemberKind::Static;
    int params = 0;
    std::vector<Instruction> body;

    bool is_static() const noexcept { return kind == MemberKind::Static; }
    bool is_clinit() const noexcept { return name == kClinitName; }
    /// Label name -> index of its `label` instruction in `body`.
    std::map<std::string, std::size_t> labels() const;
    /// A method yields a value iff its body contains `returnval`.
    bool returns_value() const;

    bool operator==(const MethodDef&) const = default;
};

struct ClassDef {
    std::string name;
    std::optional<std::string> superclass;
    bool instrumented = false;
    std::vector<FieldDef> fields;
    std::vector<MethodDef> methods;

    bool has_static_init() const { return find_method(kClinitName) != nullptr; }
    const FieldDef* find_field(std::string_view n) const;
    const MethodDef* find_method(std::string_view n) const;
    MethodDef* find_method(std::string_view n);

    bool operator==(const ClassDef&) const = default;
};

/// Declarations only: the hotswap compatibility key.
struct LayoutSignature {
    std::string class_name;
    std::string superclass;
    std::vector<std::tuple<std::string, MemberKind, FieldType, bool>> fields;
    std::vector<std::tuple<std::string, MemberKind, int>> methods;

    bool operator==(const LayoutSignature&) const = default;
};

ClassDef parse_class(std::string_view text);
std::string serialize_class(const ClassDef& c);
LayoutSignature layout_signature(const ClassDef& c);
std::string describe(const LayoutSignature& sig);

// Stack-effect verification ------------------------------------------------

struct CallEffect {
    int pops = 0;
    bool pushes = false;
};

/// Resolves the stack effect of a call instruction; nullopt when unknown.
struct EffectResolver {
    virtual ~EffectResolver() = default;
    virtual std::optional<CallEffect> invoke_static(const std::string& owner,
                                                    const std::string& method) const = 0;
    virtual std::optional<CallEffect> invoke_virtual(const std::string& method) const = 0;
};

enum class StackCheck { Verified, Deferred };

/// Checks that every path keeps a non-negative, join-consistent operand stack,
/// `return` leaves it empty and `returnval` leaves exactly one value. Returns
/// Deferred if a call's effect is unknown to `resolver`. Throws VerifyError.
StackCheck verify_stack(const ClassDef& owner, const MethodDef& m, const EffectResolver& resolver);

/// Class-local structural checks plus stack checks for calls resolvable
/// within the class. Called by parse_class.
void verify_class_local(const ClassDef& c);

}  // namespace patchvm
