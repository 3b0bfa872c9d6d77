// Copyright 2026 The graphrca Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "graphrca/builder/mini_lang.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <vector>

#include "graphrca/common/error.hpp"

namespace graphrca {
namespace {

enum class Tok { kIdent, kNumber, kString, kPunct, kKeyword, kEnd };

struct Token {
  Tok type = Tok::kEnd;
  std::string text;  // string literals are unescaped
  int line = 1;
  int column = 1;
  std::size_t begin = 0;  // byte offsets into the source
  std::size_t end = 0;
};

const std::set<std::string, std::less<>> kKeywords{
    "fn",    "class", "if",   "else",  "while", "try",
    "catch", "return", "true", "false", "null"};

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> tokens;
  int line = 1;
  int column = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    Token tok;
    tok.line = line;
    tok.column = column;
    tok.begin = i;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) {
        ++j;
      }
      tok.text = std::string(src.substr(i, j - i));
      tok.type = kKeywords.contains(tok.text) ? Tok::kKeyword : Tok::kIdent;
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() &&
             (std::isdigit(static_cast<unsigned char>(src[j])) || src[j] == '.')) {
        ++j;
      }
      tok.text = std::string(src.substr(i, j - i));
      tok.type = Tok::kNumber;
      advance(j - i);
    } else if (c == '"') {
      tok.type = Tok::kString;
      advance(1);
      while (true) {
        if (i >= src.size() || src[i] == '\n') {
          throw ParseError("unterminated string literal", tok.line, tok.column);
        }
        if (src[i] == '"') {
          advance(1);
          break;
        }
        if (src[i] == '\\' && i + 1 < src.size()) {
          char e = src[i + 1];
          tok.text.push_back(e == 'n' ? '\n' : e == 't' ? '\t' : e);
          advance(2);
          continue;
        }
        tok.text.push_back(src[i]);
        advance(1);
      }
    } else {
      static const char* kTwo[] = {"==", "!=", "<=", ">=", "&&", "||"};
      tok.type = Tok::kPunct;
      std::string two(src.substr(i, 2));
      bool matched = false;
      for (const char* op : kTwo) {
        if (two == op) {
          tok.text = two;
          advance(2);
          matched = true;
          break;
        }
      }
      if (!matched) {
        if (std::string_view("(){}[];,.=<>+-*/%!@").find(c) ==
            std::string_view::npos) {
          throw ParseError(std::string("unexpected character '") + c + "'", line,
                           column);
        }
        tok.text = std::string(1, c);
        advance(1);
      }
    }
    tok.end = i;
    tokens.push_back(std::move(tok));
  }
  Token end;
  end.type = Tok::kEnd;
  end.line = line;
  end.column = column;
  end.begin = end.end = src.size();
  tokens.push_back(end);
  return tokens;
}

// Ordered, de-duplicated accumulation.
void add_unique(std::vector<std::string>& list, const std::string& item) {
  if (std::find(list.begin(), list.end(), item) == list.end()) {
    list.push_back(item);
  }
}

struct ExprInfo {
  std::vector<std::string> uses;
  std::vector<std::string> calls;
  std::vector<std::string> literals;
  // Set when the expression is a bare identifier path (a, a.b.c) or an
  // index expression rooted at an identifier: the assignable base.
  std::optional<std::string> lvalue_base;
  std::optional<std::string> path;  // dotted path if the expr is a pure path

  void merge(const ExprInfo& other) {
    for (const auto& u : other.uses) add_unique(uses, u);
    for (const auto& c : other.calls) add_unique(calls, c);
    for (const auto& l : other.literals) add_unique(literals, l);
  }
};

class Parser {
 public:
  Parser(std::string_view src, std::string file)
      : src_(src), tokens_(lex(src)), file_(std::move(file)) {}

  ProgramFacts run() {
    ProgramFacts facts;
    facts.file = file_;
    Region module;
    module.region_id = next_id();
    module.kind = RegionKind::kModule;
    module.start = 1;
    module.text = std::string(src_);
    module.name = file_;
    regions_.push_back(module);
    const std::size_t module_index = 0;
    const std::string module_id = module.region_id;

    while (!at_end()) {
      std::size_t decorator_start = peek().begin;
      int decorator_line = peek().line;
      bool decorated = false;
      while (is_punct("@")) {
        decorated = true;
        advance();
        expect_ident("decorator name");
      }
      if (is_keyword("fn")) {
        parse_function(module_id, decorated ? decorator_start : peek().begin,
                       decorated ? decorator_line : peek().line);
      } else if (is_keyword("class")) {
        if (decorated) fail("decorators apply to functions only");
        parse_class(module_id);
      } else {
        if (decorated) fail("decorator must precede a function");
        if (is_keyword("return")) fail("return outside of a function");
        parse_statement(module_id, Arm::kNone, /*function_tail=*/false);
      }
    }
    int last_line = 1;
    for (const auto& t : tokens_) {
      if (t.type != Tok::kEnd) last_line = std::max(last_line, line_of_end(t));
    }
    regions_[module_index].end = last_line;
    facts.regions = std::move(regions_);
    return facts;
  }

 private:
  std::string_view src_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::string file_;
  std::vector<Region> regions_;
  int counter_ = 0;

  std::string next_id() { return "r" + std::to_string(counter_++); }

  const Token& peek(std::size_t ahead = 0) const {
    return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
  }
  bool at_end() const { return peek().type == Tok::kEnd; }
  const Token& advance() {
    const Token& t = tokens_[pos_];
    if (pos_ + 1 < tokens_.size()) ++pos_;
    return t;
  }
  const Token& previous() const { return tokens_[pos_ == 0 ? 0 : pos_ - 1]; }
  bool is_punct(std::string_view p) const {
    return peek().type == Tok::kPunct && peek().text == p;
  }
  bool is_keyword(std::string_view k) const {
    return peek().type == Tok::kKeyword && peek().text == k;
  }
  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(message, peek().line, peek().column);
  }
  void expect_punct(std::string_view p) {
    if (!is_punct(p)) {
      fail("expected '" + std::string(p) + "' but found '" + describe(peek()) +
           "'");
    }
    advance();
  }
  void expect_keyword(std::string_view k) {
    if (!is_keyword(k)) fail("expected '" + std::string(k) + "'");
    advance();
  }
  std::string expect_ident(std::string_view what) {
    if (peek().type != Tok::kIdent) {
      fail("expected " + std::string(what) + " but found '" + describe(peek()) +
           "'");
    }
    return advance().text;
  }
  static std::string describe(const Token& t) {
    return t.type == Tok::kEnd ? "end of input" : t.text;
  }

  int line_of_end(const Token& t) const {
    int line = t.line;
    for (std::size_t k = t.begin; k < t.end; ++k) {
      if (src_[k] == '\n') ++line;
    }
    return line;
  }

  // Closes a region that opened at `begin_offset`/`start_line` and ended
  // with the previously consumed token.
  void close(Region& region, std::size_t begin_offset) {
    const Token& last = previous();
    region.end = line_of_end(last);
    region.text = std::string(src_.substr(begin_offset, last.end - begin_offset));
  }

  std::size_t open(Region region) {
    regions_.push_back(std::move(region));
    return regions_.size() - 1;
  }

  void parse_class(const std::string& parent) {
    const Token& start = peek();
    std::size_t begin = start.begin;
    Region cls;
    cls.region_id = next_id();
    cls.kind = RegionKind::kClass;
    cls.start = start.line;
    cls.parent_region_id = parent;
    expect_keyword("class");
    cls.name = expect_ident("class name");
    std::size_t index = open(cls);
    std::string id = regions_[index].region_id;
    expect_punct("{");
    while (!is_punct("}")) {
      if (at_end()) fail("unterminated class body");
      std::size_t mbegin = peek().begin;
      int mline = peek().line;
      bool decorated = false;
      while (is_punct("@")) {
        decorated = true;
        advance();
        expect_ident("decorator name");
      }
      if (!is_keyword("fn")) fail("class bodies may only contain functions");
      parse_function(id, decorated ? mbegin : peek().begin,
                     decorated ? mline : peek().line);
    }
    expect_punct("}");
    close(regions_[index], begin);
  }

  void parse_function(const std::string& parent, std::size_t begin,
                      int start_line) {
    Region fn;
    fn.region_id = next_id();
    fn.kind = RegionKind::kFunction;
    fn.start = start_line;
    fn.parent_region_id = parent;
    expect_keyword("fn");
    fn.name = expect_ident("function name");
    expect_punct("(");
    if (!is_punct(")")) {
      while (true) {
        add_unique(fn.defs, expect_ident("parameter name"));
        if (is_punct(",")) {
          advance();
          continue;
        }
        break;
      }
    }
    expect_punct(")");
    std::size_t index = open(fn);
    std::string id = regions_[index].region_id;
    parse_block(id, Arm::kNone, /*function_body=*/true);
    close(regions_[index], begin);
  }

  // `{ stmt* }`. In a function body the last statement may be a return.
  void parse_block(const std::string& parent, Arm arm, bool function_body) {
    expect_punct("{");
    while (!is_punct("}")) {
      if (at_end()) fail("unterminated block");
      parse_statement(parent, arm, function_body);
    }
    expect_punct("}");
  }

  void parse_statement(const std::string& parent, Arm arm, bool function_body) {
    if (is_keyword("if")) return parse_if(parent, arm);
    if (is_keyword("while")) return parse_while(parent, arm);
    if (is_keyword("try")) return parse_try(parent, arm);

    const Token& start = peek();
    Region stmt;
    stmt.region_id = next_id();
    stmt.kind = RegionKind::kStatement;
    stmt.start = start.line;
    stmt.parent_region_id = parent;
    stmt.arm = arm;
    std::size_t begin = start.begin;

    if (is_keyword("return")) {
      if (!function_body) {
        fail("return is only allowed as the final statement of a function body");
      }
      advance();
      if (!is_punct(";")) {
        ExprInfo value = parse_expr();
        stmt.uses = value.uses;
        stmt.calls = value.calls;
        stmt.string_literals = value.literals;
      }
      expect_punct(";");
      if (!is_punct("}")) {
        fail("return is only allowed as the final statement of a function body");
      }
    } else {
      ExprInfo lhs = parse_expr();
      if (is_punct("=")) {
        if (!lhs.lvalue_base) fail("left side of assignment is not assignable");
        advance();
        ExprInfo rhs = parse_expr();
        // a.b = v and a[i] = v read a as well as writing it.
        ExprInfo uses;
        if (lhs.path && lhs.path->find('.') == std::string::npos) {
          lhs.uses.clear();
        }
        uses.merge(rhs);
        uses.merge(lhs);
        stmt.uses = uses.uses;
        stmt.calls = uses.calls;
        stmt.string_literals = uses.literals;
        stmt.defs.push_back(*lhs.lvalue_base);
      } else {
        if (lhs.calls.empty()) fail("expression statement must contain a call");
        stmt.uses = lhs.uses;
        stmt.calls = lhs.calls;
        stmt.string_literals = lhs.literals;
      }
      expect_punct(";");
    }
    close(stmt, begin);
    regions_.push_back(std::move(stmt));
  }

  void parse_if(const std::string& parent, Arm arm) {
    const Token& start = peek();
    std::size_t begin = start.begin;
    Region br;
    br.region_id = next_id();
    br.kind = RegionKind::kBranch;
    br.start = start.line;
    br.parent_region_id = parent;
    br.arm = arm;
    expect_keyword("if");
    expect_punct("(");
    ExprInfo cond = parse_expr();
    expect_punct(")");
    br.uses = cond.uses;
    br.calls = cond.calls;
    br.string_literals = cond.literals;
    std::size_t index = open(br);
    std::string id = regions_[index].region_id;
    parse_block(id, Arm::kThen, false);
    if (is_keyword("else")) {
      advance();
      if (is_keyword("if")) {
        parse_if(id, Arm::kElse);
      } else {
        parse_block(id, Arm::kElse, false);
      }
    }
    close(regions_[index], begin);
  }

  void parse_while(const std::string& parent, Arm arm) {
    const Token& start = peek();
    std::size_t begin = start.begin;
    Region loop;
    loop.region_id = next_id();
    loop.kind = RegionKind::kLoop;
    loop.start = start.line;
    loop.parent_region_id = parent;
    loop.arm = arm;
    expect_keyword("while");
    expect_punct("(");
    ExprInfo cond = parse_expr();
    expect_punct(")");
    loop.uses = cond.uses;
    loop.calls = cond.calls;
    loop.string_literals = cond.literals;
    std::size_t index = open(loop);
    std::string id = regions_[index].region_id;
    parse_block(id, Arm::kBody, false);
    close(regions_[index], begin);
  }

  void parse_try(const std::string& parent, Arm arm) {
    const Token& start = peek();
    std::size_t begin = start.begin;
    Region tr;
    tr.region_id = next_id();
    tr.kind = RegionKind::kTry;
    tr.start = start.line;
    tr.parent_region_id = parent;
    tr.arm = arm;
    expect_keyword("try");
    std::size_t index = open(tr);
    std::string id = regions_[index].region_id;
    parse_block(id, Arm::kBody, false);
    expect_keyword("catch");
    expect_punct("(");
    std::string var = expect_ident("exception variable");
    regions_[index].defs.push_back(var);
    expect_punct(")");
    parse_block(id, Arm::kCatch, false);
    close(regions_[index], begin);
  }

  // Precedence climbing over binary operators.
  static int precedence(const Token& t) {
    if (t.type != Tok::kPunct) return -1;
    const std::string& p = t.text;
    if (p == "||") return 1;
    if (p == "&&") return 2;
    if (p == "==" || p == "!=") return 3;
    if (p == "<" || p == "<=" || p == ">" || p == ">=") return 4;
    if (p == "+" || p == "-") return 5;
    if (p == "*" || p == "/" || p == "%") return 6;
    return -1;
  }

  ExprInfo parse_expr(int min_prec = 1) {
    ExprInfo left = parse_unary();
    while (true) {
      int prec = precedence(peek());
      if (prec < min_prec) break;
      advance();
      ExprInfo right = parse_expr(prec + 1);
      left.merge(right);
      left.lvalue_base.reset();
      left.path.reset();
    }
    return left;
  }

  ExprInfo parse_unary() {
    if (is_punct("!") || is_punct("-")) {
      advance();
      ExprInfo operand = parse_unary();
      operand.lvalue_base.reset();
      operand.path.reset();
      return operand;
    }
    return parse_postfix();
  }

  ExprInfo parse_postfix() {
    ExprInfo info = parse_primary();
    while (true) {
      if (is_punct(".")) {
        advance();
        std::string field = expect_ident("field name");
        if (info.path) {
          *info.path += "." + field;
        } else {
          info.lvalue_base.reset();
        }
      } else if (is_punct("(")) {
        advance();
        if (info.path) {
          add_unique(info.calls, *info.path);
          // A bare callee name is not a variable read; a method receiver is.
          if (info.path->find('.') == std::string::npos) {
            info.uses.erase(
                std::remove(info.uses.begin(), info.uses.end(), *info.path),
                info.uses.end());
          }
        } else {
          fail("only named functions can be called");
        }
        if (!is_punct(")")) {
          while (true) {
            info.merge(parse_expr());
            if (is_punct(",")) {
              advance();
              continue;
            }
            break;
          }
        }
        expect_punct(")");
        info.path.reset();
        info.lvalue_base.reset();
      } else if (is_punct("[")) {
        advance();
        ExprInfo index = parse_expr();
        expect_punct("]");
        info.merge(index);
        info.path.reset();
      } else {
        break;
      }
    }
    return info;
  }

  ExprInfo parse_primary() {
    ExprInfo info;
    const Token& t = peek();
    switch (t.type) {
      case Tok::kIdent:
        advance();
        info.uses.push_back(t.text);
        info.lvalue_base = t.text;
        info.path = t.text;
        return info;
      case Tok::kNumber:
        advance();
        return info;
      case Tok::kString:
        advance();
        info.literals.push_back(t.text);
        return info;
      case Tok::kKeyword:
        if (t.text == "true" || t.text == "false" || t.text == "null") {
          advance();
          return info;
        }
        fail("unexpected keyword '" + t.text + "'");
      case Tok::kPunct:
        if (t.text == "(") {
          advance();
          info = parse_expr();
          expect_punct(")");
          info.lvalue_base.reset();
          info.path.reset();
          return info;
        }
        if (t.text == "[") {
          advance();
          if (!is_punct("]")) {
            while (true) {
              info.merge(parse_expr());
              if (is_punct(",")) {
                advance();
                continue;
              }
              break;
            }
          }
          expect_punct("]");
          return info;
        }
        fail("unexpected '" + t.text + "'");
      case Tok::kEnd:
        fail("unexpected end of input");
    }
    fail("unexpected token");
  }
};

}  // namespace

ProgramFacts parse_mini_source(std::string_view text, std::string file) {
  return Parser(text, std::move(file)).run();
}

}  // namespace graphrca
