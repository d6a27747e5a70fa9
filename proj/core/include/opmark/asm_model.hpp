#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace opmark {

// Structured model of one disassembly listing. Parsing produces an
// AssemblyProgram; everything downstream (feature extraction, obfuscation,
// the corpus generator) works on this model, never on raw text. Programs
// are treated as immutable once reindex() has run and are safe to share
// across threads.

enum class InsnKind : std::uint8_t {
  Plain,
  JumpConditional,
  JumpUnconditional,
  Call,
  Return,
};

struct Instruction {
  std::uint64_t address = 0;
  std::string mnemonic;                     // lowercase, no whitespace
  std::vector<std::string> operands;        // raw operand tokens, in order
  InsnKind kind = InsnKind::Plain;
  std::optional<std::string> target;        // jumps/calls with a static target only

  bool operator==(const Instruction& other) const {
    // addresses are regenerated freely and excluded from equality
    return mnemonic == other.mnemonic && operands == other.operands &&
           kind == other.kind && target == other.target;
  }
};

struct Subroutine {
  std::string name;
  std::uint64_t start_address = 0;
  std::vector<Instruction> body;
};

struct ParseReport {
  std::size_t instruction_count = 0;
  std::size_t skipped_lines = 0;            // unparseable lines inside recognized sections
  std::vector<std::string> warnings;
};

// Where a branch target lands: subroutine position and instruction offset
// within its body.
struct ProgramLocation {
  std::size_t subroutine = 0;
  std::size_t offset = 0;
};

enum class ListingFormat { ObjdumpAtt, ObjdumpIntel, FlatAsm };

class AssemblyProgram {
 public:
  AssemblyProgram() = default;
  AssemblyProgram(std::vector<Subroutine> subroutines, std::string origin);

  const std::vector<Subroutine>& subroutines() const { return subroutines_; }
  const std::string& origin() const { return origin_; }
  const ParseReport& report() const { return report_; }
  ParseReport& report() { return report_; }

  std::size_t instruction_count() const;

  // Exact symbol match first, then exact address match (hex with or without
  // 0x, or decimal). Unresolvable targets return nullopt, never throw.
  std::optional<ProgramLocation> resolve(std::string_view target) const;

  // Rebuilds the symbol and address indexes; throws DuplicateSymbol if two
  // subroutines share a name. Addresses equal to zero everywhere are
  // synthesized sequentially (flat-asm has no address column).
  void reindex();

 private:
  std::vector<Subroutine> subroutines_;
  std::string origin_;
  ParseReport report_;
  std::unordered_map<std::string, ProgramLocation> by_symbol_;
  std::unordered_map<std::uint64_t, ProgramLocation> by_address_;
};

// Deterministic classification against a fixed table of x86 control-flow
// mnemonics. Unknown mnemonics are Plain; total function, never throws.
InsnKind classify_instruction(std::string_view mnemonic);

// Parses a complete listing. Section headers, byte columns and blank lines
// are skipped; unparseable lines inside recognized sections are tallied in
// the parse report. Throws MalformedListing when zero instructions parse
// and DuplicateSymbol on subroutine name collisions.
AssemblyProgram parse_disassembly(std::string_view text, ListingFormat format,
                                  std::string origin = "<memory>");

// Concatenated mnemonics of all subroutine bodies in program order.
// Throws EmptyProgram when the program has no instructions.
std::vector<std::string> linear_trace(const AssemblyProgram& program);

// Canonical flat-asm emission: `name:` opens a subroutine, one instruction
// per line with a single space after the mnemonic and comma-space between
// operands. Re-parsing the emission yields an equal model.
std::string emit_flat_asm(const AssemblyProgram& program);

bool is_x86_register(std::string_view token);

// Fixed opcode index shared across a corpus. UNKNOWN sits at the last slot
// and absorbs every mnemonic outside the vocabulary.
class OpcodeVocabulary {
 public:
  static constexpr std::string_view kUnknown = "UNKNOWN";

  // `tokens` must not contain UNKNOWN or duplicates; UNKNOWN is appended.
  explicit OpcodeVocabulary(std::vector<std::string> tokens);

  std::size_t size() const { return tokens_.size(); }
  std::size_t unknown_index() const { return tokens_.size() - 1; }
  std::size_t index_of(std::string_view mnemonic) const;
  const std::string& token(std::size_t index) const { return tokens_[index]; }
  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace opmark
