#include "tokenledger/store/database.hpp"

#include <sqlite3.h>

#include <string>

#include "tokenledger/errors.hpp"

namespace tokenledger::store {

namespace {

constexpr int kBusyTimeoutMs = 5000;

bool is_retriable(int code) {
    const int primary = code & 0xff;
    return primary == SQLITE_BUSY || primary == SQLITE_LOCKED || primary == SQLITE_IOERR ||
           primary == SQLITE_FULL || primary == SQLITE_CANTOPEN;
}

// Each entry upgrades the schema from version (index) to (index + 1).
constexpr const char* kMigrations[] = {
    R"sql(
CREATE TABLE ai_telemetry (
    id            TEXT PRIMARY KEY,
    ts_ms         INTEGER NOT NULL,
    agent         TEXT NOT NULL,
    operation     TEXT NOT NULL,
    provider      TEXT NOT NULL,
    model         TEXT NOT NULL,
    input_tokens  INTEGER NOT NULL CHECK (input_tokens >= 0),
    output_tokens INTEGER NOT NULL CHECK (output_tokens >= 0),
    total_tokens  INTEGER NOT NULL CHECK (total_tokens = input_tokens + output_tokens),
    cost_micros   INTEGER NOT NULL CHECK (cost_micros >= 0),
    latency_ms    INTEGER,
    feature       TEXT NOT NULL,
    status        TEXT NOT NULL CHECK (status IN ('ok', 'error')),
    error         TEXT,
    metadata      TEXT NOT NULL,
    dedup_key     TEXT UNIQUE
);
CREATE INDEX idx_ai_telemetry_ts ON ai_telemetry (ts_ms);

CREATE TABLE model_pricing (
    model_id            TEXT PRIMARY KEY,
    provider            TEXT NOT NULL,
    display_name        TEXT NOT NULL,
    input_cost_micros   INTEGER NOT NULL,
    output_cost_micros  INTEGER NOT NULL,
    updated_ms          INTEGER NOT NULL
);

CREATE TABLE review_comments (
    id          INTEGER PRIMARY KEY AUTOINCREMENT,
    body        TEXT NOT NULL,
    created_ms  INTEGER NOT NULL
);

CREATE TABLE intelligence_narratives (
    id          INTEGER PRIMARY KEY AUTOINCREMENT,
    narrative   TEXT NOT NULL,
    provider    TEXT NOT NULL,
    model       TEXT NOT NULL,
    event_id    TEXT NOT NULL,
    created_ms  INTEGER NOT NULL
);
)sql",
};

static_assert(std::size(kMigrations) == Database::kSchemaVersion);

}  // namespace

// --- Statement ---------------------------------------------------------------

Statement::Statement(Connection& conn, std::string_view sql) : conn_(&conn) {
    const int rc = sqlite3_prepare_v2(conn.handle(), sql.data(), static_cast<int>(sql.size()), &stmt_, nullptr);
    if (rc != SQLITE_OK) {
        conn.fail("prepare", rc);
    }
}

Statement::~Statement() { sqlite3_finalize(stmt_); }

Statement::Statement(Statement&& other) noexcept : conn_(other.conn_), stmt_(other.stmt_) {
    other.stmt_ = nullptr;
}

Statement& Statement::bind(int index, std::int64_t value) {
    const int rc = sqlite3_bind_int64(stmt_, index, value);
    if (rc != SQLITE_OK) conn_->fail("bind", rc);
    return *this;
}

Statement& Statement::bind(int index, std::string_view value) {
    const int rc = sqlite3_bind_text(stmt_, index, value.data(), static_cast<int>(value.size()), SQLITE_TRANSIENT);
    if (rc != SQLITE_OK) conn_->fail("bind", rc);
    return *this;
}

Statement& Statement::bind(int index, std::nullopt_t) {
    const int rc = sqlite3_bind_null(stmt_, index);
    if (rc != SQLITE_OK) conn_->fail("bind", rc);
    return *this;
}

Statement& Statement::bind(int index, const std::optional<std::int64_t>& value) {
    return value ? bind(index, *value) : bind(index, std::nullopt);
}

Statement& Statement::bind(int index, const std::optional<std::string>& value) {
    return value ? bind(index, std::string_view{*value}) : bind(index, std::nullopt);
}

bool Statement::step() {
    const int rc = sqlite3_step(stmt_);
    if (rc == SQLITE_ROW) return true;
    if (rc == SQLITE_DONE) return false;
    conn_->fail("step", rc);
}

void Statement::reset() {
    sqlite3_reset(stmt_);
    sqlite3_clear_bindings(stmt_);
}

bool Statement::is_null(int column) const { return sqlite3_column_type(stmt_, column) == SQLITE_NULL; }

std::int64_t Statement::column_int64(int column) const { return sqlite3_column_int64(stmt_, column); }

double Statement::column_double(int column) const { return sqlite3_column_double(stmt_, column); }

std::string Statement::column_text(int column) const {
    const auto* text = sqlite3_column_text(stmt_, column);
    const int size = sqlite3_column_bytes(stmt_, column);
    return text ? std::string(reinterpret_cast<const char*>(text), static_cast<std::size_t>(size)) : std::string{};
}

std::optional<std::int64_t> Statement::column_optional_int64(int column) const {
    if (is_null(column)) return std::nullopt;
    return column_int64(column);
}

std::optional<std::string> Statement::column_optional_text(int column) const {
    if (is_null(column)) return std::nullopt;
    return column_text(column);
}

// --- Connection --------------------------------------------------------------

Connection::Connection(const std::string& path, bool uri) {
    int flags = SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE | SQLITE_OPEN_FULLMUTEX;
    if (uri) flags |= SQLITE_OPEN_URI;
    const int rc = sqlite3_open_v2(path.c_str(), &db_, flags, nullptr);
    if (rc != SQLITE_OK) {
        std::string message = "cannot open database '" + path + "': ";
        message += db_ ? sqlite3_errmsg(db_) : sqlite3_errstr(rc);
        sqlite3_close(db_);
        db_ = nullptr;
        throw StorageError(message, is_retriable(rc));
    }
    sqlite3_busy_timeout(db_, kBusyTimeoutMs);
}

Connection::~Connection() { sqlite3_close_v2(db_); }

void Connection::exec(std::string_view sql) {
    const std::string owned(sql);
    char* err = nullptr;
    const int rc = sqlite3_exec(db_, owned.c_str(), nullptr, nullptr, &err);
    if (rc != SQLITE_OK) {
        std::string message = err ? err : sqlite3_errstr(rc);
        sqlite3_free(err);
        throw StorageError("sqlite exec: " + message, is_retriable(rc));
    }
}

std::int64_t Connection::changes() const { return sqlite3_changes(db_); }

void Connection::fail(std::string_view context, int code) const {
    throw StorageError("sqlite " + std::string(context) + ": " + sqlite3_errmsg(db_), is_retriable(code));
}

// --- Database ----------------------------------------------------------------

Database::Transaction::Transaction(Connection& conn, std::string_view begin) : conn_(conn) { conn_.exec(begin); }

Database::Transaction::~Transaction() {
    if (open_) {
        try {
            conn_.exec("ROLLBACK");
        } catch (...) {
        }
    }
}

void Database::Transaction::commit() {
    conn_.exec("COMMIT");
    open_ = false;
}

Database::Lease::Lease(Database& db) : db_(db) {
    {
        std::lock_guard lock(db_.pool_mutex_);
        if (!db_.readers_.empty()) {
            conn_ = std::move(db_.readers_.back());
            db_.readers_.pop_back();
        }
    }
    if (!conn_) {
        conn_ = db_.open_connection();
    }
}

Database::Lease::~Lease() {
    std::lock_guard lock(db_.pool_mutex_);
    db_.readers_.push_back(std::move(conn_));
}

Database::Database(std::string path) : path_(std::move(path)) {
    in_memory_ = path_ == ":memory:";
    writer_ = open_connection();
    if (!in_memory_) {
        writer_->exec("PRAGMA journal_mode=WAL");
        writer_->exec("PRAGMA synchronous=NORMAL");
    }
    migrate();
}

Database::~Database() = default;

std::unique_ptr<Connection> Database::open_connection() const {
    auto conn = std::make_unique<Connection>(path_, false);
    conn->exec("PRAGMA foreign_keys=ON");
    return conn;
}

int Database::schema_version() {
    return read([](Connection& conn) {
        Statement stmt(conn, "PRAGMA user_version");
        stmt.step();
        return static_cast<int>(stmt.column_int64(0));
    });
}

void Database::migrate() {
    std::lock_guard lock(writer_mutex_);
    Transaction tx(*writer_, "BEGIN IMMEDIATE");
    int version = 0;
    {
        Statement stmt(*writer_, "PRAGMA user_version");
        stmt.step();
        version = static_cast<int>(stmt.column_int64(0));
    }
    if (version > kSchemaVersion) {
        throw StorageError("database schema version " + std::to_string(version) +
                               " is newer than supported version " + std::to_string(kSchemaVersion),
                           false);
    }
    for (int v = version; v < kSchemaVersion; ++v) {
        writer_->exec(kMigrations[v]);
        writer_->exec("PRAGMA user_version = " + std::to_string(v + 1));
    }
    tx.commit();
}

}  // namespace tokenledger::store
