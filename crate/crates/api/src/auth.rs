//! Users, password hashing and opaque access tokens.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, RwLock};
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use argon2::password_hash::{PasswordHash, PasswordHasher, PasswordVerifier, SaltString};
use argon2::{Algorithm, Argon2, Params, Version};
use axum::http::StatusCode;
use rand::RngCore;
use serde::{Deserialize, Serialize};
use taas_core::store::{DocumentStore, DocumentStoreExt};

use crate::config::HashCost;
use crate::error::{ApiError, ApiResult};

pub const USER_KIND: &str = "user";
const MIN_PASSWORD_CHARS: usize = 8;

/// Stored user record. Never serialised into responses.
#[derive(Clone, Debug, Serialize, Deserialize)]
struct UserRecord {
    id: String,
    email: String,
    password_hash: String,
    created_at: u64,
}

/// Public view of a user.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct User {
    pub id: String,
    pub email: String,
    pub created_at: u64,
}

impl From<&UserRecord> for User {
    fn from(r: &UserRecord) -> Self {
        Self {
            id: r.id.clone(),
            email: r.email.clone(),
            created_at: r.created_at,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IssuedToken {
    pub token: String,
    pub user_id: String,
    pub expires_at: u64,
}

struct Session {
    user: User,
    expires_at: SystemTime,
}

pub struct AuthService {
    store: Arc<dyn DocumentStore>,
    /// Keyed by case-folded email.
    users: RwLock<HashMap<String, UserRecord>>,
    sessions: Mutex<HashMap<String, Session>>,
    ttl: Duration,
    hasher: Argon2<'static>,
    /// Verified against when the email is unknown so both failure paths cost
    /// the same.
    decoy_hash: String,
}

fn unix_secs(t: SystemTime) -> u64 {
    t.duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

fn email_key(email: &str) -> String {
    email.trim().to_lowercase()
}

fn valid_email(email: &str) -> bool {
    let Some((local, domain)) = email.split_once('@') else {
        return false;
    };
    !local.is_empty()
        && !domain.contains('@')
        && domain.contains('.')
        && !domain.starts_with('.')
        && !domain.ends_with('.')
        && !email.chars().any(char::is_whitespace)
}

fn random_hex(bytes: usize) -> String {
    let mut buf = vec![0u8; bytes];
    rand::rng().fill_bytes(&mut buf);
    buf.iter().map(|b| format!("{b:02x}")).collect()
}

impl AuthService {
    pub fn new(store: Arc<dyn DocumentStore>, ttl: Duration, cost: HashCost) -> taas_core::Result<Self> {
        let params = Params::new(cost.memory_kib, cost.iterations, 1, None)
            .map_err(|e| taas_core::Error::Builder(format!("password hash parameters: {e}")))?;
        let hasher = Argon2::new(Algorithm::Argon2id, Version::V0x13, params);
        let mut users = HashMap::new();
        for id in store.list(USER_KIND)? {
            let record: UserRecord = store.get_json(USER_KIND, &id)?;
            users.insert(email_key(&record.email), record);
        }
        let mut service = Self {
            store,
            users: RwLock::new(users),
            sessions: Mutex::new(HashMap::new()),
            ttl,
            hasher,
            decoy_hash: String::new(),
        };
        service.decoy_hash = service
            .hash(&random_hex(16))
            .map_err(|e| taas_core::Error::Builder(e.message))?;
        Ok(service)
    }

    fn hash(&self, password: &str) -> ApiResult<String> {
        let mut salt = [0u8; 16];
        rand::rng().fill_bytes(&mut salt);
        let salt = SaltString::encode_b64(&salt).map_err(|e| ApiError::internal(e.to_string()))?;
        self.hasher
            .hash_password(password.as_bytes(), &salt)
            .map(|h| h.to_string())
            .map_err(|e| ApiError::internal(e.to_string()))
    }

    fn verify(&self, password: &str, hash: &str) -> bool {
        PasswordHash::new(hash)
            .map(|parsed| self.hasher.verify_password(password.as_bytes(), &parsed).is_ok())
            .unwrap_or(false)
    }

    pub fn register(&self, email: &str, password: &str) -> ApiResult<User> {
        let email = email.trim();
        if !valid_email(email) {
            return Err(ApiError::bad_request("validation", "email is not valid")
                .with_details(serde_json::json!({ "field": "email" })));
        }
        if password.chars().count() < MIN_PASSWORD_CHARS {
            return Err(ApiError::bad_request(
                "validation",
                format!("password must have at least {MIN_PASSWORD_CHARS} characters"),
            )
            .with_details(serde_json::json!({ "field": "password" })));
        }
        let password_hash = self.hash(password)?;
        let mut users = self.users.write().expect("user lock");
        let key = email_key(email);
        if users.contains_key(&key) {
            return Err(ApiError::new(
                StatusCode::CONFLICT,
                "email_taken",
                "an account with this email already exists",
            ));
        }
        let record = UserRecord {
            id: random_hex(16),
            email: email.to_owned(),
            password_hash,
            created_at: unix_secs(SystemTime::now()),
        };
        self.store.put_json(USER_KIND, &record.id, &record)?;
        let user = User::from(&record);
        users.insert(key, record);
        Ok(user)
    }

    pub fn login(&self, email: &str, password: &str) -> ApiResult<IssuedToken> {
        let record = self.users.read().expect("user lock").get(&email_key(email)).cloned();
        let Some(record) = record else {
            self.verify(password, &self.decoy_hash);
            return Err(ApiError::invalid_credentials());
        };
        if !self.verify(password, &record.password_hash) {
            return Err(ApiError::invalid_credentials());
        }
        let token = random_hex(32);
        let expires_at = SystemTime::now() + self.ttl;
        self.sessions.lock().expect("session lock").insert(
            token.clone(),
            Session {
                user: User::from(&record),
                expires_at,
            },
        );
        Ok(IssuedToken {
            token,
            user_id: record.id,
            expires_at: unix_secs(expires_at),
        })
    }

    /// The user owning `token`, if the token exists and has not expired.
    pub fn authenticate(&self, token: &str) -> Option<User> {
        let mut sessions = self.sessions.lock().expect("session lock");
        let session = sessions.get(token)?;
        if SystemTime::now() >= session.expires_at {
            sessions.remove(token);
            return None;
        }
        Some(session.user.clone())
    }

    /// Revokes `token`. Returns whether it was active.
    pub fn logout(&self, token: &str) -> bool {
        self.sessions.lock().expect("session lock").remove(token).is_some()
    }
}
