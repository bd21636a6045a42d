#ifndef LOGPREP_H
#define LOGPREP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LpStatus {
  LP_STATUS_OK = 0,
  LP_STATUS_NULL_ARGUMENT = 1,
  LP_STATUS_INVALID_UTF8 = 2,
  LP_STATUS_IO = 3,
  LP_STATUS_CONFIG = 4,
  LP_STATUS_MISMATCH = 5,
  LP_STATUS_OUT_OF_RANGE = 6,
  LP_STATUS_PANIC = 7,
} LpStatus;

typedef enum LpParserKind {
  LP_PARSER_KIND_DRAIN = 0,
  LP_PARSER_KIND_LFA = 1,
} LpParserKind;

/*
 An ordered set of masking rules.
 */
typedef struct LpCatalog LpCatalog;

/*
 Templates assigned to a batch of lines.
 */
typedef struct LpOutcome LpOutcome;

typedef struct LpParserConfig {
  enum LpParserKind kind;
  size_t drain_depth;
  double drain_similarity_threshold;
  size_t drain_max_children;
  /*
   Lines scanned for rule applicability; 0 disables the filter.
   */
  size_t applicability_prefix;
} LpParserConfig;

typedef struct LpScores {
  double ga;
  double pa;
  double fga;
  double fta;
} LpScores;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failed call on this thread, or null. Valid until the
 next failing call on the same thread.
 */
const char *lp_last_error(void);

/*
 # Safety
 `s` must come from this library or be null.
 */
void lp_string_free(char *s);

/*
 The built-in refined catalog.
 */
struct LpCatalog *lp_catalog_default(void);

/*
 Loads `builtin:<name>` or a catalog JSON file.

 # Safety
 `spec` must be a NUL-terminated string; `out` must be writable.
 */
enum LpStatus lp_catalog_load(const char *spec, struct LpCatalog **out);

/*
 Builds a catalog from a JSON array of rules.

 # Safety
 `json` must be a NUL-terminated string; `out` must be writable.
 */
enum LpStatus lp_catalog_from_json(const char *json, struct LpCatalog **out);

/*
 # Safety
 `catalog` must come from this library or be null.
 */
void lp_catalog_free(struct LpCatalog *catalog);

/*
 Number of enabled rules, or 0 for a null handle.

 # Safety
 `catalog` must be a live handle or null.
 */
size_t lp_catalog_enabled_count(const struct LpCatalog *catalog);

/*
 Masks one message.

 # Safety
 `catalog` must be a live handle, `content` NUL-terminated and `out`
 writable.
 */
enum LpStatus lp_mask(const struct LpCatalog *catalog, const char *content, char **out);

/*
 Drain with its usual settings and the default applicability prefix.
 */
struct LpParserConfig lp_parser_config_default(void);

/*
 Masks (when `catalog` is non-null) and parses `n` lines; line ids are
 1..=n in input order.

 # Safety
 `lines` must point to `n` NUL-terminated strings; `config` and `out`
 must be valid pointers; `catalog` must be a live handle or null.
 */
enum LpStatus lp_parse(const struct LpCatalog *catalog,
                       const char *const *lines,
                       size_t n,
                       const struct LpParserConfig *config,
                       struct LpOutcome **out);

/*
 # Safety
 `outcome` must come from this library or be null.
 */
void lp_outcome_free(struct LpOutcome *outcome);

/*
 Number of parsed lines.

 # Safety
 `outcome` must be a live handle or null.
 */
size_t lp_outcome_len(const struct LpOutcome *outcome);

/*
 Number of distinct templates.

 # Safety
 `outcome` must be a live handle or null.
 */
size_t lp_outcome_group_count(const struct LpOutcome *outcome);

/*
 Template of line `index` (0-based). The string belongs to the outcome.

 # Safety
 `outcome` must be a live handle and `out` writable.
 */
enum LpStatus lp_outcome_template(const struct LpOutcome *outcome, size_t index, const char **out);

/*
 Scores an outcome against `n` ground-truth templates given in line order.

 # Safety
 `outcome` must be a live handle, `truth` must point to `n`
 NUL-terminated strings and `out` must be writable.
 */
enum LpStatus lp_evaluate(const struct LpOutcome *outcome,
                          const char *const *truth,
                          size_t n,
                          struct LpScores *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LOGPREP_H */
