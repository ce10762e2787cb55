/*
 * claimsearch C API.
 *
 * Every call returns a cls_status. On failure, cls_last_error() holds a
 * message for the calling thread until its next API call. Strings returned
 * through char** out-parameters are owned by the caller and released with
 * cls_string_free(). Paths are UTF-8. JSON in and out is UTF-8 text.
 */
#ifndef CLAIMSEARCH_H
#define CLAIMSEARCH_H

#include <stddef.h>

#if defined(_WIN32)
#define CLS_API __declspec(dllexport)
#else
#define CLS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cls_status {
  CLS_OK = 0,
  CLS_INVALID_ARGUMENT,
  CLS_IO,
  CLS_MALFORMED_XML,
  CLS_MISSING_DOC_ID,
  CLS_DOC_MISMATCH,
  CLS_EMPTY_RESOLUTION,
  CLS_CONFIG_ERROR,
  CLS_POOL_TOO_SMALL,
  CLS_DEGENERATE_SPLIT,
  CLS_REMOTE_UNAVAILABLE,
  CLS_TEXT_TOO_LONG,
  CLS_DIM_MISMATCH,
  CLS_EMPTY_CLAIM,
  CLS_NO_CHUNKS,
  CLS_NO_ELEMENTS,
  CLS_NO_PARAGRAPHS,
  CLS_WEIGHT_MISALIGNMENT,
  CLS_PROVIDER_MISMATCH,
  CLS_DUPLICATE_CHUNK_REF,
  CLS_DOC_NOT_FOUND,
  CLS_SCORER_FAILURE,
  CLS_INDEX_NOT_LOADED,
  CLS_INTERNAL
} cls_status;

/* Stable name, e.g. "EmptyClaim". Never NULL. */
CLS_API const char* cls_status_name(cls_status status);
/* Message of the last failed call on this thread; "" after a success. */
CLS_API const char* cls_last_error(void);
CLS_API void cls_string_free(char* s);
CLS_API const char* cls_version(void);

/* XML files or directories -> normalized document JSONL at out_path.
 * jurisdiction: "EP", "US", "OTHER" or NULL/"auto". */
CLS_API cls_status cls_ingest(const char* const* inputs, size_t n_inputs, const char* jurisdiction,
                              const char* out_path, char** summary_json);

/* Citation table (.csv or .jsonl) -> CitationRecord JSONL plus discard
 * report JSONL ({raw, reason, subject_doc_id, cited_doc_id}). discard_path
 * may be NULL. */
CLS_API cls_status cls_parse_citations(const char* input_path, const char* out_path, const char* discard_path,
                                       char** summary_json);

/* Options: {citations, corpus, out, max_seq_len, train_frac, seed, threads,
 * eval_records (bool, default true)}. Writes pairs.jsonl, splits.jsonl,
 * stats.json and, with eval_records, eval_xa.jsonl and eval_xrandom.jsonl. */
CLS_API cls_status cls_build_dataset(const char* options_json, char** summary_json);

/* Options: {input, out, embedder{...}}. input is JSONL with a "text" field
 * or plain text, one text per line. Writes a vector cache JSONL. */
CLS_API cls_status cls_embed(const char* options_json, char** summary_json);

/* Options: {corpus, out, embedder{...}, max_seq_len, ann_params{...}}. */
CLS_API cls_status cls_index_build(const char* options_json, char** summary_json);

/* Options: {index, corpus, embedder{...}, claim_text, elements, k, rerank_n,
 * report (path for score report JSONL)}. Output has the /search shape. */
CLS_API cls_status cls_index_query(const char* options_json, char** response_json);

/* Options: {records, method, negative, seed, embedder{...}, max_seq_len,
 * threads} or {citations, corpus, splits, ...} to build records first. */
CLS_API cls_status cls_eval(const char* options_json, char** report_json, char** table_text);

/* {kept:[{kind,start,end,rendered}], discarded:[{raw,reason}]} */
CLS_API cls_status cls_parse_passage_field(const char* raw, char** result_json);

typedef struct cls_engine cls_engine;

/* Service configuration JSON (see README); environment overrides apply. The
 * index is loaded when configured. */
CLS_API cls_status cls_engine_open(const char* config_json, cls_engine** out);
CLS_API void cls_engine_close(cls_engine* engine);
CLS_API cls_status cls_engine_search(cls_engine* engine, const char* request_json, char** response_json);
/* query_id may be NULL. */
CLS_API cls_status cls_engine_document(cls_engine* engine, const char* doc_id, const char* query_id,
                                       char** document_json);
/* NULL or "" keeps the current paths. */
CLS_API cls_status cls_engine_reload(cls_engine* engine, const char* index_dir, const char* corpus_path);
CLS_API cls_status cls_engine_health(cls_engine* engine, char** health_json);
/* HTTP status the service would answer for a status code. */
CLS_API int cls_http_status(cls_status status);

typedef struct cls_server cls_server;

/* The engine must outlive the server. */
CLS_API cls_status cls_server_create(cls_engine* engine, cls_server** out);
/* port 0 binds a free port; see cls_server_bound_port. Returns once
 * listening. */
CLS_API cls_status cls_server_start(cls_server* server, const char* host, int port);
CLS_API int cls_server_bound_port(const cls_server* server);
CLS_API void cls_server_stop(cls_server* server);
/* Blocks until stopped. */
CLS_API void cls_server_wait(cls_server* server);
CLS_API void cls_server_destroy(cls_server* server);

#ifdef __cplusplus
}
#endif

#endif
