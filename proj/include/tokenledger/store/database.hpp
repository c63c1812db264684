#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

struct sqlite3;
struct sqlite3_stmt;

namespace tokenledger::store {

class Connection;

/// RAII prepared statement. Bind indices are 1-based, column indices 0-based.
class Statement {
public:
    Statement(Connection& conn, std::string_view sql);
    ~Statement();
    Statement(const Statement&) = delete;
    Statement& operator=(const Statement&) = delete;
    Statement(Statement&& other) noexcept;
    Statement& operator=(Statement&&) = delete;

    Statement& bind(int index, std::int64_t value);
    Statement& bind(int index, std::string_view value);
    Statement& bind(int index, const std::string& value) { return bind(index, std::string_view(value)); }
    Statement& bind(int index, const char* value) { return bind(index, std::string_view(value)); }
    Statement& bind(int index, std::nullopt_t);
    Statement& bind(int index, const std::optional<std::int64_t>& value);
    Statement& bind(int index, const std::optional<std::string>& value);

    /// Advances the cursor. Returns true while a row is available.
    bool step();
    void reset();

    bool is_null(int column) const;
    std::int64_t column_int64(int column) const;
    double column_double(int column) const;
    std::string column_text(int column) const;
    std::optional<std::int64_t> column_optional_int64(int column) const;
    std::optional<std::string> column_optional_text(int column) const;

private:
    Connection* conn_;
    sqlite3_stmt* stmt_ = nullptr;
};

class Connection {
public:
    Connection(const std::string& path, bool uri);
    ~Connection();
    Connection(const Connection&) = delete;
    Connection& operator=(const Connection&) = delete;

    void exec(std::string_view sql);
    std::int64_t changes() const;
    sqlite3* handle() const { return db_; }

    /// Throws StorageError describing the connection's last error.
    [[noreturn]] void fail(std::string_view context, int code) const;

private:
    sqlite3* db_ = nullptr;
};

/// One embedded database file shared by every module.
///
/// Writes run on a single connection behind a mutex, inside an immediate
/// transaction. Reads run on pooled connections inside a deferred
/// transaction, so each read callback sees one consistent snapshot (WAL).
/// The path ":memory:" gives a private in-memory database whose reads share
/// the writer connection.
class Database {
public:
    static constexpr int kSchemaVersion = 1;

    explicit Database(std::string path);
    ~Database();
    Database(const Database&) = delete;
    Database& operator=(const Database&) = delete;

    const std::string& path() const { return path_; }
    int schema_version();

    template <typename F>
    auto write(F&& fn) {
        std::lock_guard lock(writer_mutex_);
        Transaction tx(*writer_, "BEGIN IMMEDIATE");
        if constexpr (std::is_void_v<decltype(fn(*writer_))>) {
            fn(*writer_);
            tx.commit();
        } else {
            auto result = fn(*writer_);
            tx.commit();
            return result;
        }
    }

    template <typename F>
    auto read(F&& fn) {
        if (in_memory_) {
            std::lock_guard lock(writer_mutex_);
            return run_read(*writer_, fn);
        }
        Lease lease(*this);
        return run_read(lease.connection(), fn);
    }

private:
    class Transaction {
    public:
        Transaction(Connection& conn, std::string_view begin);
        ~Transaction();
        void commit();

    private:
        Connection& conn_;
        bool open_ = true;
    };

    class Lease {
    public:
        explicit Lease(Database& db);
        ~Lease();
        Connection& connection() { return *conn_; }

    private:
        Database& db_;
        std::unique_ptr<Connection> conn_;
    };

    template <typename F>
    static auto run_read(Connection& conn, F& fn) {
        Transaction tx(conn, "BEGIN");
        if constexpr (std::is_void_v<decltype(fn(conn))>) {
            fn(conn);
            tx.commit();
        } else {
            auto result = fn(conn);
            tx.commit();
            return result;
        }
    }

    void migrate();
    std::unique_ptr<Connection> open_connection() const;

    std::string path_;
    bool in_memory_ = false;
    std::mutex writer_mutex_;
    std::unique_ptr<Connection> writer_;
    std::mutex pool_mutex_;
    std::vector<std::unique_ptr<Connection>> readers_;
};

}  // namespace tokenledger::store
