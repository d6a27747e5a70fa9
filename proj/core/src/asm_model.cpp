#include "opmark/asm_model.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <unordered_set>

#include "opmark/errors.hpp"

namespace opmark {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

// Collapses internal whitespace runs to a single space so that emitted and
// re-parsed operand tokens compare equal.
std::string collapse_spaces(std::string_view s) {
  std::string out;
  bool in_space = false;
  for (char c : trim(s)) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      in_space = true;
      continue;
    }
    if (in_space && !out.empty()) out.push_back(' ');
    in_space = false;
    out.push_back(c);
  }
  return out;
}

bool is_symbol_token(std::string_view s) {
  if (s.empty()) return false;
  auto head = [](char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '$';
  };
  auto tail = [&](char c) {
    return head(c) || std::isdigit(static_cast<unsigned char>(c)) || c == '@';
  };
  if (!head(s[0])) return false;
  return std::all_of(s.begin() + 1, s.end(), tail);
}

bool is_hex_token(std::string_view s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isxdigit(c); });
}

bool is_dec_token(std::string_view s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isdigit(c); });
}

const std::unordered_set<std::string_view>& prefix_tokens() {
  static const std::unordered_set<std::string_view> set = {
      "lock", "rep",  "repe",   "repz",   "repne", "repnz",
      "bnd",  "notrack", "data16", "addr32",
  };
  return set;
}

const std::unordered_set<std::string_view>& unconditional_jumps() {
  static const std::unordered_set<std::string_view> set = {
      "jmp", "jmpq", "jmpl", "jmpw", "ljmp", "ljmpq",
  };
  return set;
}

const std::unordered_set<std::string_view>& conditional_jumps() {
  // jcc family plus the loop ops; "jeq" appears in hand-written listings.
  static const std::unordered_set<std::string_view> set = {
      "ja",   "jae",  "jb",   "jbe",  "jc",   "je",   "jeq",  "jz",
      "jg",   "jge",  "jl",   "jle",  "jna",  "jnae", "jnb",  "jnbe",
      "jnc",  "jne",  "jng",  "jnge", "jnl",  "jnle", "jno",  "jnp",
      "jns",  "jnz",  "jo",   "jp",   "jpe",  "jpo",  "js",   "jcxz",
      "jecxz", "jrcxz", "loop", "loope", "loopne", "loopz", "loopnz",
  };
  return set;
}

const std::unordered_set<std::string_view>& call_mnemonics() {
  static const std::unordered_set<std::string_view> set = {
      "call", "callq", "calll", "callw", "lcall",
  };
  return set;
}

const std::unordered_set<std::string_view>& return_mnemonics() {
  static const std::unordered_set<std::string_view> set = {
      "ret", "retq", "retl", "retw", "retn", "retf",
      "iret", "iretd", "iretq", "sysret", "sysretq", "sysexit",
  };
  return set;
}

bool valid_mnemonic(std::string_view s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '.' || c == '_';
  });
}

// Splits an operand string on commas at parenthesis/bracket depth zero.
std::vector<std::string> split_operands(std::string_view s) {
  std::vector<std::string> out;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (c == '(' || c == '[') ++depth;
    if (c == ')' || c == ']') --depth;
    if (c == ',' && depth == 0) {
      std::string tok = collapse_spaces(s.substr(start, i - start));
      if (!tok.empty()) out.push_back(std::move(tok));
      start = i + 1;
    }
  }
  std::string tok = collapse_spaces(s.substr(start));
  if (!tok.empty()) out.push_back(std::move(tok));
  return out;
}

// Pulls a static branch target out of a jump/call operand, or nullopt for
// indirect forms. Handles the objdump "4010a0 <sym>" annotation, bare hex
// addresses, and flat-asm label tokens.
std::optional<std::string> extract_target(const std::vector<std::string>& operands,
                                          ListingFormat format) {
  if (operands.empty()) return std::nullopt;
  const std::string& op = operands.back();
  if (op.empty() || op[0] == '*') return std::nullopt;  // AT&T indirect
  if (op.find('[') != std::string::npos) return std::nullopt;  // memory operand

  // "4010a0 <sym>" or "4010a0 <sym+0x18>"
  std::size_t lt = op.find('<');
  if (lt != std::string::npos && op.back() == '>') {
    std::string inner = op.substr(lt + 1, op.size() - lt - 2);
    std::string addr = std::string(trim(op.substr(0, lt)));
    if (inner.find('+') == std::string::npos && is_symbol_token(inner)) return inner;
    if (!addr.empty()) {
      if (addr.rfind("0x", 0) == 0) addr = addr.substr(2);
      if (is_hex_token(addr)) return "0x" + lower(addr);
    }
    if (is_symbol_token(inner)) return inner;
    return std::nullopt;
  }

  if (op.rfind("0x", 0) == 0 && is_hex_token(op.substr(2))) return lower(op);
  if (format != ListingFormat::FlatAsm) {
    // objdump prints branch addresses as bare hex
    if (is_hex_token(op)) return "0x" + lower(op);
  } else if (is_dec_token(op)) {
    return op;
  }
  if (is_symbol_token(op) && !is_x86_register(op)) return op;
  return std::nullopt;
}

struct ProgramBuilder {
  std::vector<Subroutine> subroutines;
  ParseReport report;
  bool has_open = false;

  void open_subroutine(std::string name, std::uint64_t address) {
    subroutines.push_back(Subroutine{std::move(name), address, {}});
    has_open = true;
  }

  void add_instruction(Instruction insn) {
    if (!has_open) open_subroutine(".text", insn.address);
    subroutines.back().body.push_back(std::move(insn));
    ++report.instruction_count;
  }

  void skip_line(std::string_view line) {
    ++report.skipped_lines;
    if (report.warnings.size() < 8)
      report.warnings.push_back("skipped: " + std::string(line.substr(0, 80)));
  }
};

// Turns "mnemonic rest-of-line" into an Instruction. Prefix decorations
// (lock, rep, ...) move into the operand list so the vocabulary only sees
// core mnemonics.
std::optional<Instruction> parse_instruction_text(std::string_view text,
                                                  ListingFormat format,
                                                  std::uint64_t address) {
  text = trim(text);
  if (text.empty()) return std::nullopt;
  std::size_t sp = text.find_first_of(" \t");
  std::string head = lower(text.substr(0, sp));
  std::string_view rest = sp == std::string_view::npos ? std::string_view{} : text.substr(sp + 1);

  std::vector<std::string> leading;
  while (prefix_tokens().count(head) && !trim(rest).empty()) {
    leading.push_back(head);
    rest = trim(rest);
    sp = rest.find_first_of(" \t");
    head = lower(rest.substr(0, sp));
    rest = sp == std::string_view::npos ? std::string_view{} : rest.substr(sp + 1);
  }
  if (!valid_mnemonic(head)) return std::nullopt;

  Instruction insn;
  insn.address = address;
  insn.mnemonic = std::move(head);
  insn.operands = std::move(leading);
  for (auto& op : split_operands(rest)) insn.operands.push_back(std::move(op));
  insn.kind = classify_instruction(insn.mnemonic);
  if (insn.kind == InsnKind::JumpConditional || insn.kind == InsnKind::JumpUnconditional ||
      insn.kind == InsnKind::Call) {
    insn.target = extract_target(insn.operands, format);
  }
  return insn;
}

void parse_flat_asm(std::string_view text, ProgramBuilder& builder) {
  std::size_t pos = 0;
  std::uint64_t next_address = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.size() - pos
                                                                           : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;

    std::size_t hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.back() == ':') {
      std::string_view name = line.substr(0, line.size() - 1);
      if (is_symbol_token(name)) {
        builder.open_subroutine(std::string(name), next_address);
        continue;
      }
      builder.skip_line(line);
      continue;
    }

    auto insn = parse_instruction_text(line, ListingFormat::FlatAsm, next_address);
    if (!insn) {
      builder.skip_line(line);
      continue;
    }
    ++next_address;
    builder.add_instruction(std::move(*insn));
  }
}

bool is_byte_column(std::string_view s) {
  // "48 c7 c0 3c 00 00 00" style continuation content
  bool any = false;
  std::size_t i = 0;
  while (i < s.size()) {
    if (std::isspace(static_cast<unsigned char>(s[i]))) { ++i; continue; }
    if (i + 1 < s.size() && std::isxdigit(static_cast<unsigned char>(s[i])) &&
        std::isxdigit(static_cast<unsigned char>(s[i + 1]))) {
      any = true;
      i += 2;
      continue;
    }
    return false;
  }
  return any;
}

void parse_objdump(std::string_view text, ListingFormat format, ProgramBuilder& builder) {
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.size() - pos
                                                                           : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;

    std::size_t hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.rfind("Disassembly of section", 0) == 0) continue;
    if (line.find("file format") != std::string_view::npos) continue;
    if (line == "...") continue;

    // "0000000000401000 <main>:" opens a subroutine
    std::size_t lt = line.find('<');
    if (lt != std::string_view::npos && line.back() == ':' &&
        line[line.size() - 2] == '>') {
      std::string_view addr_part = trim(line.substr(0, lt));
      std::string_view name = line.substr(lt + 1, line.size() - lt - 3);
      if (is_hex_token(addr_part) && !name.empty()) {
        builder.open_subroutine(std::string(name),
                                std::stoull(std::string(addr_part), nullptr, 16));
        continue;
      }
    }

    // "  401000:\t66 90\txchg ax,ax"
    std::size_t colon = line.find(':');
    if (colon == std::string_view::npos || !is_hex_token(trim(line.substr(0, colon)))) {
      builder.skip_line(line);
      continue;
    }
    std::uint64_t address = std::stoull(std::string(trim(line.substr(0, colon))), nullptr, 16);
    std::string_view rest = line.substr(colon + 1);

    std::string_view insn_text;
    std::size_t tab = rest.find('\t');
    if (tab != std::string_view::npos) {
      std::string_view first = rest.substr(0, tab);
      std::string_view second = trim(rest.substr(tab + 1));
      std::size_t tab2 = second.find('\t');
      if (tab2 != std::string_view::npos) {
        insn_text = trim(second.substr(tab2 + 1));
      } else if (is_byte_column(first) || first.empty()) {
        insn_text = second;
      } else {
        insn_text = trim(rest);
      }
    } else {
      insn_text = trim(rest);
    }
    if (insn_text.empty() || is_byte_column(insn_text)) continue;  // byte continuation

    auto insn = parse_instruction_text(insn_text, format, address);
    if (!insn) {
      builder.skip_line(line);
      continue;
    }
    builder.add_instruction(std::move(*insn));
  }
}

}  // namespace

InsnKind classify_instruction(std::string_view mnemonic) {
  if (unconditional_jumps().count(mnemonic)) return InsnKind::JumpUnconditional;
  if (conditional_jumps().count(mnemonic)) return InsnKind::JumpConditional;
  if (call_mnemonics().count(mnemonic)) return InsnKind::Call;
  if (return_mnemonics().count(mnemonic)) return InsnKind::Return;
  return InsnKind::Plain;
}

bool is_x86_register(std::string_view token) {
  static const std::unordered_set<std::string_view> regs = {
      "rax", "rbx", "rcx", "rdx", "rsi", "rdi", "rbp", "rsp",
      "r8",  "r9",  "r10", "r11", "r12", "r13", "r14", "r15",
      "eax", "ebx", "ecx", "edx", "esi", "edi", "ebp", "esp",
      "r8d", "r9d", "r10d", "r11d", "r12d", "r13d", "r14d", "r15d",
      "ax",  "bx",  "cx",  "dx",  "si",  "di",  "bp",  "sp",
      "r8w", "r9w", "r10w", "r11w", "r12w", "r13w", "r14w", "r15w",
      "al",  "bl",  "cl",  "dl",  "ah",  "bh",  "ch",  "dh",
      "sil", "dil", "bpl", "spl",
      "r8b", "r9b", "r10b", "r11b", "r12b", "r13b", "r14b", "r15b",
      "rip", "eip", "ip",  "cs",  "ds",  "es",  "fs",  "gs",  "ss",
  };
  return regs.count(token) > 0;
}

AssemblyProgram::AssemblyProgram(std::vector<Subroutine> subroutines, std::string origin)
    : subroutines_(std::move(subroutines)), origin_(std::move(origin)) {
  reindex();
}

std::size_t AssemblyProgram::instruction_count() const {
  std::size_t n = 0;
  for (const auto& sub : subroutines_) n += sub.body.size();
  return n;
}

void AssemblyProgram::reindex() {
  bool all_zero = true;
  for (const auto& sub : subroutines_) {
    if (sub.start_address != 0) all_zero = false;
    for (const auto& insn : sub.body)
      if (insn.address != 0) all_zero = false;
  }
  if (all_zero) {
    std::uint64_t next = 0;
    for (auto& sub : subroutines_) {
      sub.start_address = next;
      for (auto& insn : sub.body) insn.address = next++;
      if (sub.body.empty()) ++next;
    }
  }

  by_symbol_.clear();
  by_address_.clear();
  for (std::size_t s = 0; s < subroutines_.size(); ++s) {
    const auto& sub = subroutines_[s];
    if (!by_symbol_.emplace(sub.name, ProgramLocation{s, 0}).second)
      throw DuplicateSymbol("duplicate subroutine name: " + sub.name);
    std::uint64_t prev = 0;
    for (std::size_t i = 0; i < sub.body.size(); ++i) {
      by_address_.emplace(sub.body[i].address, ProgramLocation{s, i});
      if (i > 0 && sub.body[i].address <= prev && report_.warnings.size() < 8)
        report_.warnings.push_back("non-increasing address in " + sub.name);
      prev = sub.body[i].address;
    }
  }
}

std::optional<ProgramLocation> AssemblyProgram::resolve(std::string_view target) const {
  if (target.empty()) return std::nullopt;
  auto sym = by_symbol_.find(std::string(target));
  if (sym != by_symbol_.end()) return sym->second;

  auto lookup = [&](std::uint64_t addr) -> std::optional<ProgramLocation> {
    auto it = by_address_.find(addr);
    if (it != by_address_.end()) return it->second;
    return std::nullopt;
  };
  try {
    if (target.rfind("0x", 0) == 0 || target.rfind("0X", 0) == 0) {
      if (is_hex_token(target.substr(2)))
        return lookup(std::stoull(std::string(target.substr(2)), nullptr, 16));
      return std::nullopt;
    }
    if (is_dec_token(target)) {
      if (auto hit = lookup(std::stoull(std::string(target), nullptr, 10))) return hit;
    }
    if (is_hex_token(target))
      return lookup(std::stoull(std::string(target), nullptr, 16));
  } catch (const std::exception&) {
    return std::nullopt;
  }
  return std::nullopt;
}

AssemblyProgram parse_disassembly(std::string_view text, ListingFormat format,
                                  std::string origin) {
  ProgramBuilder builder;
  if (format == ListingFormat::FlatAsm) {
    parse_flat_asm(text, builder);
    origin += " (flat-asm)";
  } else {
    parse_objdump(text, format, builder);
    origin += format == ListingFormat::ObjdumpAtt ? " (objdump-att)" : " (objdump-intel)";
  }
  if (builder.report.instruction_count == 0)
    throw MalformedListing("no instruction lines found in " + origin);

  AssemblyProgram program(std::move(builder.subroutines), std::move(origin));
  program.report() = std::move(builder.report);
  return program;
}

std::vector<std::string> linear_trace(const AssemblyProgram& program) {
  std::vector<std::string> trace;
  trace.reserve(program.instruction_count());
  for (const auto& sub : program.subroutines())
    for (const auto& insn : sub.body) trace.push_back(insn.mnemonic);
  if (trace.empty()) throw EmptyProgram("program has no instructions");
  return trace;
}

std::string emit_flat_asm(const AssemblyProgram& program) {
  std::ostringstream out;
  for (const auto& sub : program.subroutines()) {
    out << sub.name << ":\n";
    for (const auto& insn : sub.body) {
      out << "    ";
      std::size_t start = 0;
      // prefix decorations were folded into the operand list; emit them
      // back in front of the mnemonic so the text stays valid assembly
      while (start < insn.operands.size() && prefix_tokens().count(insn.operands[start])) {
        out << insn.operands[start] << ' ';
        ++start;
      }
      out << insn.mnemonic;
      for (std::size_t i = start; i < insn.operands.size(); ++i)
        out << (i == start ? " " : ", ") << insn.operands[i];
      out << '\n';
    }
  }
  return out.str();
}

OpcodeVocabulary::OpcodeVocabulary(std::vector<std::string> tokens)
    : tokens_(std::move(tokens)) {
  tokens_.emplace_back(kUnknown);
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (!index_.emplace(tokens_[i], i).second)
      throw DuplicateSymbol("duplicate vocabulary token: " + tokens_[i]);
  }
}

std::size_t OpcodeVocabulary::index_of(std::string_view mnemonic) const {
  auto it = index_.find(std::string(mnemonic));
  return it == index_.end() ? unknown_index() : it->second;
}

}  // namespace opmark
